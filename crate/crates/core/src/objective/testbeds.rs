use std::collections::BTreeSet;
use std::sync::Arc;

use super::{spectral_norm, Matrix, MinimaxProblem, Objective, Regime, SmoothnessData};
use crate::error::{check_dim, invalid, Result};
use crate::geometry::{ConstraintSet, Vector};

/// `f(x, y) = sum_i sin(x_i) + x'By - (mu/2)||y||^2`
#[derive(Clone, Debug)]
pub struct SineCoupled {
    pub b_mat: Matrix,
    pub mu: f64,
}

impl Objective for SineCoupled {
    fn dims(&self) -> (usize, usize) {
        self.b_mat.shape()
    }

    fn value(&self, x: &Vector, y: &Vector) -> f64 {
        x.iter().map(|v| v.sin()).sum::<f64>() + x.dot(&(&self.b_mat * y))
            - 0.5 * self.mu * y.norm_squared()
    }

    fn grad_x(&self, x: &Vector, y: &Vector) -> Vector {
        x.map(f64::cos) + &self.b_mat * y
    }

    fn grad_y(&self, x: &Vector, y: &Vector) -> Vector {
        self.b_mat.tr_mul(x) - y * self.mu
    }
}

pub fn make_nc_sc_sine(
    b_mat: Matrix,
    mu: f64,
    x_set: ConstraintSet,
    y_set: ConstraintSet,
) -> Result<MinimaxProblem> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(invalid(format!("sine testbed needs mu > 0, got {mu}")));
    }
    let (nx, ny) = b_mat.shape();
    let l12 = spectral_norm(&b_mat);
    let constants = SmoothnessData {
        l_x: 1.0,
        l_y: mu,
        l12,
        l21: l12,
        mu,
        theta: 0.0,
    };
    MinimaxProblem::new(
        format!("sine{nx}x{ny}"),
        x_set,
        y_set,
        Arc::new(SineCoupled { b_mat, mu }),
        constants,
        BTreeSet::from([Regime::NcSc]),
    )
}

/// Labelled points for the robust-SVM toy; one row of `features` per point.
#[derive(Clone, Debug)]
pub struct SvmData {
    pub features: Matrix,
    pub labels: Vec<f64>,
}

pub const HINGE_WIDTH: f64 = 0.1;

/// Robust linear classifier against a bounded feature perturbation.
///
/// Variables: `x = (w, b)` in R^{m+1}, `y = (u, v)` in R^{m+1}.
/// `f = v (<w, u> + b) + mean_i h(1 - l_i (<w, a_i + u> + b))`
/// with `h` the hinge smoothed quadratically over a window of width 0.1.
/// Convex in x, nonconcave in y.
#[derive(Clone, Debug)]
pub struct RobustSvm {
    pub data: SvmData,
}

fn hinge(z: f64) -> f64 {
    if z <= 0.0 {
        0.0
    } else if z < HINGE_WIDTH {
        z * z / (2.0 * HINGE_WIDTH)
    } else {
        z - HINGE_WIDTH / 2.0
    }
}

fn hinge_slope(z: f64) -> f64 {
    (z / HINGE_WIDTH).clamp(0.0, 1.0)
}

impl RobustSvm {
    fn m(&self) -> usize {
        self.data.features.ncols()
    }

    /// Per-point (label, margin argument z_i, shifted feature a_i + u).
    fn points<'a>(
        &'a self,
        x: &'a Vector,
        y: &'a Vector,
    ) -> impl Iterator<Item = (f64, f64, Vector)> + 'a {
        let m = self.m();
        let w = x.rows(0, m);
        let bias = x[m];
        let u = y.rows(0, m);
        (0..self.data.labels.len()).map(move |i| {
            let shifted: Vector = self.data.features.row(i).transpose() + u;
            let l = self.data.labels[i];
            let z = 1.0 - l * (w.dot(&shifted) + bias);
            (l, z, shifted)
        })
    }
}

impl Objective for RobustSvm {
    fn dims(&self) -> (usize, usize) {
        (self.m() + 1, self.m() + 1)
    }

    fn value(&self, x: &Vector, y: &Vector) -> f64 {
        let m = self.m();
        let n = self.data.labels.len() as f64;
        let coupling = y[m] * (x.rows(0, m).dot(&y.rows(0, m)) + x[m]);
        coupling + self.points(x, y).map(|(_, z, _)| hinge(z)).sum::<f64>() / n
    }

    fn grad_x(&self, x: &Vector, y: &Vector) -> Vector {
        let m = self.m();
        let n = self.data.labels.len() as f64;
        let mut g = Vector::zeros(m + 1);
        g.rows_mut(0, m).copy_from(&(y.rows(0, m) * y[m]));
        g[m] = y[m];
        for (l, z, shifted) in self.points(x, y) {
            let s = -l * hinge_slope(z) / n;
            g.rows_mut(0, m).axpy(s, &shifted, 1.0);
            g[m] += s;
        }
        g
    }

    fn grad_y(&self, x: &Vector, y: &Vector) -> Vector {
        let m = self.m();
        let n = self.data.labels.len() as f64;
        let w = x.rows(0, m);
        let mut scale = y[m];
        for (l, z, _) in self.points(x, y) {
            scale -= l * hinge_slope(z) / n;
        }
        let mut g = Vector::zeros(m + 1);
        g.rows_mut(0, m).copy_from(&(w * scale));
        g[m] = w.dot(&y.rows(0, m)) + x[m];
        g
    }
}

/// Robust-SVM toy with `x` in a centred ball of radius `x_radius`, the
/// perturbation `u` in a centred ball of radius `u_radius`, and `v` in
/// `[v_lo, v_hi]`. Constants are bounds derived over those sets.
pub fn make_robust_svm_toy(
    data: SvmData,
    x_radius: f64,
    u_radius: f64,
    v_lo: f64,
    v_hi: f64,
) -> Result<MinimaxProblem> {
    let (n, m) = data.features.shape();
    check_dim(n, data.labels.len())?;
    if n == 0 || m == 0 {
        return Err(invalid("svm toy needs at least one point and one feature"));
    }
    if data.labels.iter().any(|&l| l != 1.0 && l != -1.0) {
        return Err(invalid("svm labels must be +1 or -1"));
    }
    if !data.features.iter().all(|v| v.is_finite()) {
        return Err(invalid("svm features must be finite"));
    }
    let x_set = ConstraintSet::ball(vec![0.0; m + 1], x_radius)?;
    let y_set = ConstraintSet::product(vec![
        ConstraintSet::ball(vec![0.0; m], u_radius)?,
        ConstraintSet::boxed(vec![v_lo], vec![v_hi])?,
    ])?;

    let delta = HINGE_WIDTH;
    let a_max = (0..n)
        .map(|i| data.features.row(i).norm())
        .fold(0.0, f64::max);
    let (rw, ru, vmax) = (x_radius, u_radius, v_lo.abs().max(v_hi.abs()));
    let l_x = ((a_max + ru).powi(2) + 1.0) / delta;
    let l_y = rw * rw / delta + rw;
    let cross = vmax + 1.0 + rw * (a_max + ru) / delta + rw / delta + ru + 1.0;
    let constants = SmoothnessData {
        l_x,
        l_y,
        l12: cross,
        l21: cross,
        mu: 0.0,
        theta: 0.0,
    };
    MinimaxProblem::new(
        format!("svm{n}x{m}"),
        x_set,
        y_set,
        Arc::new(RobustSvm { data }),
        constants,
        BTreeSet::from([Regime::CNc]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one_point() -> RobustSvm {
        RobustSvm {
            data: SvmData {
                features: Matrix::from_row_slice(1, 2, &[10.0, 0.0]),
                labels: vec![1.0],
            },
        }
    }

    #[test]
    fn coupling_vanishes_at_zero_classifier() {
        let svm = one_point();
        let x = Vector::zeros(3);
        for y in [
            Vector::from_vec(vec![0.3, -0.2, 0.9]),
            Vector::from_vec(vec![1.0, 1.0, -1.0]),
        ] {
            // with w = 0, b = 0 only the hinge at z = 1 remains
            assert_relative_eq!(svm.value(&x, &y), hinge(1.0));
        }
    }

    #[test]
    fn coupling_term_is_one_on_aligned_unit_vectors() {
        let svm = one_point();
        let x = Vector::from_vec(vec![1.0, 0.0, 0.0]);
        let y = Vector::from_vec(vec![1.0, 0.0, 1.0]);
        // margin is 11 so the hinge is inactive; f is the coupling term alone
        assert_relative_eq!(svm.value(&x, &y), 1.0);
    }

    #[test]
    fn hinge_is_c1() {
        let d = HINGE_WIDTH;
        assert_relative_eq!(hinge(d), d / 2.0);
        assert_relative_eq!(hinge_slope(d), 1.0);
        assert_eq!(hinge(-1.0), 0.0);
    }

    #[test]
    fn sine_constants() {
        let p = make_nc_sc_sine(
            Matrix::identity(2, 2) * 0.5,
            2.0,
            ConstraintSet::cube(2, -1.0, 1.0).unwrap(),
            ConstraintSet::cube(2, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(p.constants.l_y, 2.0);
        assert_relative_eq!(p.constants.l12, 0.5);
        assert!(p.tags.contains(&Regime::NcSc));
    }
}
