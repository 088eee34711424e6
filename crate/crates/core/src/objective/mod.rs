//! Smooth minimax objectives `min_x max_y f(x, y)` with their constants.

mod quadratic;
mod testbeds;
pub mod zoo;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::geometry::{ConstraintSet, Vector};

pub use quadratic::{make_bilinear, make_quadratic, Quadratic};
pub use testbeds::{make_nc_sc_sine, make_robust_svm_toy, RobustSvm, SineCoupled, SvmData};

pub type Matrix = DMatrix<f64>;

/// Curvature structure of a problem, which selects the step schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// nonconvex in x, strongly concave in y
    #[serde(rename = "nc_sc")]
    NcSc,
    /// nonconvex in x, concave in y
    #[serde(rename = "nc_c")]
    NcC,
    /// strongly convex in x, nonconcave in y
    #[serde(rename = "sc_nc")]
    ScNc,
    /// convex in x, nonconcave in y
    #[serde(rename = "c_nc")]
    CNc,
}

impl Regime {
    pub const ALL: [Regime; 4] = [Regime::NcSc, Regime::NcC, Regime::ScNc, Regime::CNc];

    pub fn name(self) -> &'static str {
        match self {
            Regime::NcSc => "nc_sc",
            Regime::NcC => "nc_c",
            Regime::ScNc => "sc_nc",
            Regime::CNc => "c_nc",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Regime::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| {
                invalid(format!(
                    "unknown regime '{s}' (expected nc_sc, nc_c, sc_nc or c_nc)"
                ))
            })
    }
}

/// Lipschitz and curvature constants.
///
/// `l_x`, `l_y`: gradient Lipschitz constants within each block.
/// `l12`: Lipschitz constant of `grad_y f` in x; `l21`: of `grad_x f` in y.
/// `mu`: strong concavity in y; `theta`: strong convexity in x (0 if absent).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessData {
    pub l_x: f64,
    pub l_y: f64,
    pub l12: f64,
    pub l21: f64,
    pub mu: f64,
    pub theta: f64,
}

impl SmoothnessData {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("L_x", self.l_x),
            ("L_y", self.l_y),
            ("L12", self.l12),
            ("L21", self.l21),
            ("mu", self.mu),
            ("theta", self.theta),
        ];
        for (n, v) in named {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(format!(
                    "constant {n} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Bound on the norm of the full joint Hessian.
    pub fn joint_lipschitz(&self) -> f64 {
        self.l_x + self.l_y + self.l12.max(self.l21)
    }
}

/// Oracle access to `f`.
pub trait Objective: Send + Sync + fmt::Debug {
    fn dims(&self) -> (usize, usize);
    fn value(&self, x: &Vector, y: &Vector) -> f64;
    fn grad_x(&self, x: &Vector, y: &Vector) -> Vector;
    fn grad_y(&self, x: &Vector, y: &Vector) -> Vector;
}

/// An objective together with its feasible sets, constants and regime tags.
#[derive(Clone, Debug)]
pub struct MinimaxProblem {
    pub name: String,
    pub x_set: ConstraintSet,
    pub y_set: ConstraintSet,
    pub objective: Arc<dyn Objective>,
    pub constants: SmoothnessData,
    pub tags: BTreeSet<Regime>,
}

impl MinimaxProblem {
    pub fn new(
        name: impl Into<String>,
        x_set: ConstraintSet,
        y_set: ConstraintSet,
        objective: Arc<dyn Objective>,
        constants: SmoothnessData,
        tags: BTreeSet<Regime>,
    ) -> Result<Self> {
        let (nx, ny) = objective.dims();
        check_dim(nx, x_set.dim())?;
        check_dim(ny, y_set.dim())?;
        constants.validate()?;
        if tags.contains(&Regime::NcSc) && constants.mu <= 0.0 {
            return Err(invalid("nc_sc tag requires mu > 0"));
        }
        if tags.contains(&Regime::ScNc) && constants.theta <= 0.0 {
            return Err(invalid("sc_nc tag requires theta > 0"));
        }
        Ok(MinimaxProblem {
            name: name.into(),
            x_set,
            y_set,
            objective,
            constants,
            tags,
        })
    }

    pub fn dim_x(&self) -> usize {
        self.x_set.dim()
    }

    pub fn dim_y(&self) -> usize {
        self.y_set.dim()
    }

    pub fn value(&self, x: &Vector, y: &Vector) -> f64 {
        self.objective.value(x, y)
    }

    pub fn grad_x(&self, x: &Vector, y: &Vector) -> Vector {
        self.objective.grad_x(x, y)
    }

    pub fn grad_y(&self, x: &Vector, y: &Vector) -> Vector {
        self.objective.grad_y(x, y)
    }

    pub fn check_point(&self, x: &Vector, y: &Vector) -> Result<()> {
        check_dim(self.dim_x(), x.len())?;
        check_dim(self.dim_y(), y.len())
    }

    /// Replaces the feasible sets, keeping the objective and constants.
    ///
    /// Constants derived from set bounds (as for the robust-SVM toy) are not
    /// recomputed, so only use this with objectives whose constants are global.
    pub fn with_sets(mut self, x_set: ConstraintSet, y_set: ConstraintSet) -> Result<Self> {
        check_dim(self.dim_x(), x_set.dim())?;
        check_dim(self.dim_y(), y_set.dim())?;
        self.x_set = x_set;
        self.y_set = y_set;
        Ok(self)
    }
}

/// `f(x, y) + (b/2)||x||^2 - (c/2)||y||^2`
#[derive(Clone, Copy, Debug)]
pub struct RegularizedObjective<'a> {
    pub base: &'a MinimaxProblem,
    pub b: f64,
    pub c: f64,
}

impl RegularizedObjective<'_> {
    pub fn value(&self, x: &Vector, y: &Vector) -> f64 {
        self.base.value(x, y) + 0.5 * self.b * x.norm_squared() - 0.5 * self.c * y.norm_squared()
    }

    pub fn grads(&self, x: &Vector, y: &Vector) -> (Vector, Vector) {
        let gx = self.base.grad_x(x, y) + x * self.b;
        let gy = self.base.grad_y(x, y) - y * self.c;
        (gx, gy)
    }
}

/// Gradients of the regularized objective, with dimension checks.
pub fn regularized_grads(
    problem: &MinimaxProblem,
    x: &Vector,
    y: &Vector,
    b: f64,
    c: f64,
) -> Result<(Vector, Vector)> {
    problem.check_point(x, y)?;
    if !(b >= 0.0) || !(c >= 0.0) {
        return Err(invalid(format!(
            "regularization weights must be non-negative, got b={b}, c={c}"
        )));
    }
    Ok(RegularizedObjective {
        base: problem,
        b,
        c,
    }
    .grads(x, y))
}

pub(crate) fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

/// (min, max) eigenvalues of a symmetric matrix.
pub(crate) fn eigen_range(m: &Matrix) -> (f64, f64) {
    let e = SymmetricEigen::new(m.clone()).eigenvalues;
    (e.min(), e.max())
}

pub(crate) fn check_symmetric(m: &Matrix, name: &str) -> Result<()> {
    if !m.is_square() {
        return Err(invalid(format!(
            "{name} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = 1.0 + m.amax();
    if (m - m.transpose()).amax() > 1e-12 * scale {
        return Err(invalid(format!("{name} must be symmetric")));
    }
    Ok(())
}
