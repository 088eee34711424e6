use serde::{Deserialize, Serialize};

use crate::geometry::Vector;
use crate::schedules::RegimeConfig;
use crate::verify::MonitorReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Agp,
    Gda,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Agp => "agp",
            SolverKind::Gda => "gda",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIter,
}

/// One row of a trace. Values that do not apply are NaN.
///
/// `dx_norm`/`dy_norm` are `||x_{k+1} - x_k||`, `||y_{k+1} - y_k||`.
/// `monitor_slack` is `rhs - lhs` of the regime's main potential
/// inequality at index k (negative means violated).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub f_value: f64,
    pub gap_norm: f64,
    pub reg_gap_norm: f64,
    pub beta: f64,
    pub gamma: f64,
    pub b: f64,
    pub c: f64,
    pub dx_norm: f64,
    pub dy_norm: f64,
    pub potential: f64,
    pub monitor_slack: f64,
    pub gap_x_norm: f64,
    pub gap_y_norm: f64,
    /// gap measured with unit step weights, comparable across k
    pub unit_gap_norm: f64,
}

#[derive(Clone, Debug)]
pub struct SolverTrace {
    pub solver: SolverKind,
    pub config: Option<RegimeConfig>,
    pub eps: f64,
    pub records: Vec<IterationRecord>,
    pub reason: StopReason,
    /// first k with gap <= eps
    pub t_eps: Option<usize>,
    /// first k with regularized gap <= eps/2
    pub t_reg_half_eps: Option<usize>,
    pub floored_iterations: usize,
    /// last recorded iterate (x_T, y_T on convergence)
    pub final_x: Vector,
    pub final_y: Vector,
    /// `(x_k, y_k)` for k = 1..=len+1 when retained
    pub iterates: Option<Vec<(Vector, Vector)>>,
    pub monitor: Option<MonitorReport>,
}

impl SolverTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_gap(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.gap_norm)
    }

    /// First index whose gap is at most `eps`.
    pub fn first_hit(&self, eps: f64) -> Option<usize> {
        self.records.iter().find(|r| r.gap_norm <= eps).map(|r| r.k)
    }
}
