use crate::geometry::Vector;
use crate::objective::MinimaxProblem;
use crate::schedules::{regularization_at, RegimeConfig};

/// Iterates needed to evaluate the potential at index `k`.
///
/// The x-potential regimes (nc_sc, nc_c) use `y_prev = y_{k-1}`; the
/// y-potential regimes (sc_nc, c_nc) use `x_next = x_{k+1}`.
#[derive(Clone, Copy, Debug)]
pub struct PotentialWindow<'a> {
    pub k: usize,
    pub x: &'a Vector,
    pub y: &'a Vector,
    pub y_prev: Option<&'a Vector>,
    pub x_next: Option<&'a Vector>,
}

/// Coefficient of `-||y_k - y_{k-1}||^2` in the nc_sc potential, without the
/// positive `2/(rho^2 mu)` part. Also used for the potential's lower bound.
pub fn nc_sc_offset(rho: f64, mu: f64, l_y: f64) -> f64 {
    mu + 7.0 / (2.0 * rho) - rho * l_y * l_y / 2.0 - 2.0 * l_y * l_y / mu
}

/// Regime potential at index `k`, or `None` while the window is incomplete.
pub fn potential_value(
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
    w: &PotentialWindow<'_>,
) -> Option<f64> {
    let d = &problem.constants;
    let k = w.k;
    match *cfg {
        RegimeConfig::NcSc { rho, .. } => {
            let dy2 = (w.y - w.y_prev?).norm_squared();
            let coef = 2.0 / (rho * rho * d.mu) - nc_sc_offset(rho, d.mu, d.l_y);
            Some(problem.value(w.x, w.y) + coef * dy2)
        }
        RegimeConfig::NcC { rho_bar, .. } => {
            if k < 3 {
                return None;
            }
            let dy2 = (w.y - w.y_prev?).norm_squared();
            let y2 = w.y.norm_squared();
            let c = |j| regularization_at(cfg, j);
            Some(
                problem.value(w.x, w.y)
                    + (4.0 / (rho_bar * rho_bar * c(k)) - 7.0 / (2.0 * rho_bar)) * dy2
                    - (4.0 / rho_bar) * (c(k - 2) / c(k - 1) - 1.0) * y2
                    - c(k - 1) / 2.0 * y2,
            )
        }
        RegimeConfig::ScNc { zeta, .. } => {
            let xn = w.x_next?;
            let dx2 = (xn - w.x).norm_squared();
            let coef = 2.0 / (zeta * zeta * d.theta) + d.theta / 2.0 - 3.0 / zeta;
            Some(problem.value(xn, w.y) - coef * dx2)
        }
        RegimeConfig::CNc { zeta_bar, .. } => {
            if k < 2 {
                return None;
            }
            let xn = w.x_next?;
            let dx2 = (xn - w.x).norm_squared();
            let x2 = xn.norm_squared();
            let q = |j| regularization_at(cfg, j);
            Some(
                problem.value(xn, w.y)
                    + (17.0 / (5.0 * zeta_bar) - 4.0 / (zeta_bar * zeta_bar * q(k))) * dx2
                    + (q(k - 1) / 2.0 - (4.0 / zeta_bar) * (1.0 - q(k - 1) / q(k))) * x2,
            )
        }
    }
}
