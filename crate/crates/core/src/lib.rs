//! Single-loop alternating gradient projection for smooth constrained
//! minimax problems `min_{x in X} max_{y in Y} f(x, y)`.
//!
//! Four curvature regimes are covered: nonconvex-(strongly) concave and
//! (strongly) convex-nonconcave. Alongside the solver the crate ships
//! runtime checks of the per-iteration descent inequalities, iteration
//! bound calculators, and a benchmark harness.
//!
//! ```
//! use agp::prelude::*;
//!
//! let problem = agp::objective::zoo::scaled_bilinear(1, 1.0, 1.0).unwrap();
//! let cfg = RegimeConfig::NcC { eta_bar: 0.5, rho_bar: 1.0, tau: 3.0 };
//! let init = Init::Point { x: vec![1.0], y: vec![1.0] };
//! let trace = run(&problem, &cfg, 1e-2, 100_000, init).unwrap();
//! assert!(trace.t_eps.is_some());
//! ```

// `!(x > 0.0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
mod descriptor;
pub mod error;
pub mod geometry;
pub mod objective;
pub mod schedules;
pub mod solver;
pub mod verify;

pub use descriptor::{Call, Value};
pub use error::{Error, Result};

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{ConstraintSet, Extent, Vector};
    pub use crate::objective::{MinimaxProblem, Regime, SmoothnessData};
    pub use crate::schedules::{auto_configure, params_at, validate, RegimeConfig, StepParams};
    pub use crate::solver::{run, run_gda, run_with, Init, RunOptions, SolverTrace, StopReason};
    pub use crate::verify::{compute_bound, lemma_monitor, TheoryConstants};
}

#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/sets.md")]
    pub mod sets {}
    #[doc = include_str!("../../../book/src/problems.md")]
    pub mod problems {}
    #[doc = include_str!("../../../book/src/schedules.md")]
    pub mod schedules {}
    #[doc = include_str!("../../../book/src/solver.md")]
    pub mod solver {}
    #[doc = include_str!("../../../book/src/monitors.md")]
    pub mod monitors {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/harness.md")]
    pub mod harness {}
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
}
