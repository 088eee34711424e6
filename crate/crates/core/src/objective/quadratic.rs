use std::collections::BTreeSet;
use std::sync::Arc;

use super::{
    check_symmetric, eigen_range, spectral_norm, Matrix, MinimaxProblem, Objective, Regime,
    SmoothnessData,
};
use crate::error::{check_dim, invalid, Result};
use crate::geometry::{ConstraintSet, Vector};

/// `f(x, y) = x'Ax/2 + a'x + x'By - y'Cy/2 - c'y`
#[derive(Clone, Debug)]
pub struct Quadratic {
    pub a_mat: Matrix,
    pub b_mat: Matrix,
    pub c_mat: Matrix,
    pub a_lin: Vector,
    pub c_lin: Vector,
}

impl Objective for Quadratic {
    fn dims(&self) -> (usize, usize) {
        (self.a_mat.nrows(), self.c_mat.nrows())
    }

    fn value(&self, x: &Vector, y: &Vector) -> f64 {
        0.5 * x.dot(&(&self.a_mat * x)) + self.a_lin.dot(x) + x.dot(&(&self.b_mat * y))
            - 0.5 * y.dot(&(&self.c_mat * y))
            - self.c_lin.dot(y)
    }

    fn grad_x(&self, x: &Vector, y: &Vector) -> Vector {
        &self.a_mat * x + &self.a_lin + &self.b_mat * y
    }

    fn grad_y(&self, x: &Vector, y: &Vector) -> Vector {
        self.b_mat.tr_mul(x) - &self.c_mat * y - &self.c_lin
    }
}

const PSD_TOL: f64 = 1e-10;

/// Builds a quadratic problem and reads its constants off the spectra.
///
/// Tags: `nc_sc` when C is positive definite, otherwise `nc_c` when C is
/// positive semidefinite; symmetrically `sc_nc` / `c_nc` from A.
pub fn make_quadratic(
    a_mat: Matrix,
    b_mat: Matrix,
    c_mat: Matrix,
    a_lin: Vector,
    c_lin: Vector,
    x_set: ConstraintSet,
    y_set: ConstraintSet,
) -> Result<MinimaxProblem> {
    check_symmetric(&a_mat, "A")?;
    check_symmetric(&c_mat, "C")?;
    let (nx, ny) = (a_mat.nrows(), c_mat.nrows());
    check_dim(nx, b_mat.nrows())?;
    check_dim(ny, b_mat.ncols())?;
    check_dim(nx, a_lin.len())?;
    check_dim(ny, c_lin.len())?;
    let finite = |m: &Matrix| m.iter().all(|v| v.is_finite());
    if !finite(&a_mat)
        || !finite(&b_mat)
        || !finite(&c_mat)
        || !a_lin.iter().chain(c_lin.iter()).all(|v| v.is_finite())
    {
        return Err(invalid("quadratic coefficients must be finite"));
    }

    let (a_min, _) = eigen_range(&a_mat);
    let (c_min, _) = eigen_range(&c_mat);
    let l_x = spectral_norm(&a_mat);
    let l_y = spectral_norm(&c_mat);
    let l12 = spectral_norm(&b_mat);
    let tol_a = PSD_TOL * (1.0 + l_x);
    let tol_c = PSD_TOL * (1.0 + l_y);
    let mu = if c_min > tol_c { c_min } else { 0.0 };
    let theta = if a_min > tol_a { a_min } else { 0.0 };

    let mut tags = BTreeSet::new();
    if mu > 0.0 {
        tags.insert(Regime::NcSc);
    } else if c_min >= -tol_c {
        tags.insert(Regime::NcC);
    }
    if theta > 0.0 {
        tags.insert(Regime::ScNc);
    } else if a_min >= -tol_a {
        tags.insert(Regime::CNc);
    }

    let constants = SmoothnessData {
        l_x,
        l_y,
        l12,
        l21: l12,
        mu,
        theta,
    };
    let q = Quadratic {
        a_mat,
        b_mat,
        c_mat,
        a_lin,
        c_lin,
    };
    MinimaxProblem::new(
        format!("quadratic{nx}x{ny}"),
        x_set,
        y_set,
        Arc::new(q),
        constants,
        tags,
    )
}

/// `f(x, y) = x'By`
pub fn make_bilinear(
    b_mat: Matrix,
    x_set: ConstraintSet,
    y_set: ConstraintSet,
) -> Result<MinimaxProblem> {
    if b_mat.iter().all(|&v| v == 0.0) {
        return Err(invalid("bilinear coupling matrix must be nonzero"));
    }
    let (nx, ny) = b_mat.shape();
    let mut p = make_quadratic(
        Matrix::zeros(nx, nx),
        b_mat,
        Matrix::zeros(ny, ny),
        Vector::zeros(nx),
        Vector::zeros(ny),
        x_set,
        y_set,
    )?;
    p.name = format!("bilinear{nx}x{ny}");
    Ok(p)
}
