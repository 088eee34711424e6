//! Worst-case iteration bounds for reaching a gap of `eps`.

use serde::{Deserialize, Serialize};

use super::oracles::{function_range, FunctionRange};
use crate::error::{invalid, Error, Result};
use crate::objective::MinimaxProblem;
use crate::schedules::RegimeConfig;
use crate::solver::{nc_sc_offset, potential_value, trajectory, Init, PotentialWindow};

/// Problem- and run-dependent constants entering the iteration bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum TheoryConstants {
    /// `T <= (F_1 - F_low) / (d1 eps^2)`
    NcSc {
        d1: f64,
        initial_potential: f64,
        potential_floor: f64,
    },
    /// `T <= max((64 rho_bar (tau-2) L12^2 d3 d4 / eps^2 + 2)^2, s^4/(rho_bar^4 eps^4) + 1)`
    NcC {
        rho_bar: f64,
        tau: f64,
        l12: f64,
        d3: f64,
        d4: f64,
        sigma_hat_y: f64,
    },
    /// `T <= (F_high - F_1) / (d1 eps^2)`
    ScNc {
        d1: f64,
        initial_potential: f64,
        potential_ceiling: f64,
    },
    /// `T <= max((64 zeta_bar (tau-2) L21^2 d3 d4 / eps^2 + 1)^2, s^4/(zeta_bar^4 eps^4) + 1)`
    CNc {
        zeta_bar: f64,
        tau: f64,
        l21: f64,
        d3: f64,
        d4: f64,
        sigma_hat_x: f64,
    },
}

fn bounded(v: Option<f64>, what: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Unsupported(format!("bound needs a bounded {what}")))
}

impl TheoryConstants {
    /// Derives the constants for `problem` run from `init` under `cfg`,
    /// using [`function_range`] for the bounds on f.
    pub fn assemble(problem: &MinimaxProblem, cfg: &RegimeConfig, init: &Init) -> Result<Self> {
        let range = function_range(problem)?;
        Self::assemble_with_range(problem, cfg, init, range)
    }

    pub fn assemble_with_range(
        problem: &MinimaxProblem,
        cfg: &RegimeConfig,
        init: &Init,
        range: FunctionRange,
    ) -> Result<Self> {
        cfg.check()?;
        let d = problem.constants;
        let sigma_x = bounded(problem.x_set.diameter().finite(), "X")?;
        let sigma_y = bounded(problem.y_set.diameter().finite(), "Y")?;
        let traj = trajectory(problem, cfg, init, 3)?;
        let at = |k: usize| &traj[k - 1];
        let potential = |k: usize, prev: bool| {
            let (x, y) = at(k);
            let w = PotentialWindow {
                k,
                x,
                y,
                y_prev: prev.then(|| &at(k - 1).1),
                x_next: (!prev).then(|| &at(k + 1).0),
            };
            potential_value(problem, cfg, &w).ok_or_else(|| invalid("potential window incomplete"))
        };
        let out = match *cfg {
            RegimeConfig::NcSc { eta, rho } => {
                let l2 = d.l12 * d.l12;
                let a = eta / 2.0 - rho * l2 / 2.0 - 2.0 * l2 / (rho * d.mu * d.mu);
                let b = (3.0 * d.mu - rho * d.l_y * d.l_y) / 2.0
                    + (d.mu - 4.0 * rho * d.l_y * d.l_y) / (2.0 * rho * d.mu);
                let d1 = a.min(b) / (eta * eta + 2.0 * l2).max(2.0 / (rho * rho));
                let (x1, y1) = at(1);
                TheoryConstants::NcSc {
                    d1,
                    // y_0 = y_1, so the first potential is f(x_1, y_1)
                    initial_potential: problem.value(x1, y1),
                    potential_floor: range.lower
                        - nc_sc_offset(rho, d.mu, d.l_y) * sigma_y * sigma_y,
                }
            }
            RegimeConfig::NcC {
                eta_bar,
                rho_bar,
                tau,
            } => {
                if !(d.l12 > 0.0) {
                    return Err(Error::Infeasible("nc_c bound needs L12 > 0".into()));
                }
                let sh = bounded(problem.y_set.max_norm().finite(), "Y")?;
                let (l2, t2) = (d.l12 * d.l12, tau - 2.0);
                let d1_bar = 8.0 * tau * tau / (t2 * t2)
                    + (2.0 * (rho_bar * l2 - eta_bar).powi(2) + 3.0 * l2)
                        / (256.0 * rho_bar * rho_bar * t2 * t2 * l2 * l2);
                let d4 = d1_bar.max(5.0 * 3f64.sqrt() / (8.0 * t2 * rho_bar * rho_bar * l2));
                let f3 = potential(3, true)?;
                let d3 = f3 - range.lower
                    + 7.0 * sigma_y * sigma_y / (2.0 * rho_bar)
                    + (6.0
                        + 3.0
                            / (128.0 * t2 * rho_bar * rho_bar * l2 * d1_bar)
                                .max(120.0 * 2f64.sqrt()))
                        * sh
                        * sh
                        / rho_bar;
                TheoryConstants::NcC {
                    rho_bar,
                    tau,
                    l12: d.l12,
                    d3,
                    d4,
                    sigma_hat_y: sh,
                }
            }
            RegimeConfig::ScNc { zeta, nu } => {
                let l2 = d.l21 * d.l21;
                let a = nu / 2.0 - zeta * l2 / 2.0 - 2.0 * l2 / (zeta * d.theta * d.theta);
                let b = (3.0 * d.theta - zeta * d.l_x * d.l_x) / 2.0
                    + (d.theta - 4.0 * zeta * d.l_x * d.l_x) / (2.0 * zeta * d.theta);
                let d1 = a.min(b) / (1.0 / (zeta * zeta) + 2.0 * d.l12 * d.l12).max(2.0 * nu * nu);
                TheoryConstants::ScNc {
                    d1,
                    initial_potential: potential(1, false)?,
                    potential_ceiling: range.upper
                        - (d.theta / 2.0 - 3.0 / zeta) * sigma_x * sigma_x,
                }
            }
            RegimeConfig::CNc {
                zeta_bar,
                nu_bar,
                tau,
            } => {
                if !(d.l21 > 0.0) {
                    return Err(Error::Infeasible("c_nc bound needs L21 > 0".into()));
                }
                let sh = bounded(problem.x_set.max_norm().finite(), "X")?;
                let (l2, t2) = (d.l21 * d.l21, tau - 2.0);
                let d1_hat = 16.0 * tau * tau / (t2 * t2)
                    + (zeta_bar * l2 - nu_bar).powi(2)
                        / (64.0 * t2 * t2 * l2 * l2 * zeta_bar * zeta_bar);
                let d4 = d1_hat.max(
                    5.0 * 2f64.sqrt() * (1.0 + 2.0 * d.l12 * d.l12 * zeta_bar * zeta_bar)
                        / (16.0 * t2 * zeta_bar * zeta_bar * l2),
                );
                let f2 = potential(2, false)?;
                let d3 = range.upper - f2
                    + 17.0 * sigma_x * sigma_x / (5.0 * zeta_bar)
                    + 31.0 * sh * sh / (5.0 * zeta_bar);
                TheoryConstants::CNc {
                    zeta_bar,
                    tau,
                    l21: d.l21,
                    d3,
                    d4,
                    sigma_hat_x: sh,
                }
            }
        };
        Ok(out)
    }
}

/// Upper bound on the number of iterations needed to reach a gap of `eps`.
pub fn compute_bound(c: &TheoryConstants, eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!(
            "eps must be finite and positive, got {eps}"
        )));
    }
    let e2 = eps * eps;
    match *c {
        TheoryConstants::NcSc {
            d1,
            initial_potential,
            potential_floor,
        } => {
            if !(d1 > 0.0) {
                return Err(Error::Infeasible(format!(
                    "rate constant d1 = {d1} is not positive"
                )));
            }
            Ok((initial_potential - potential_floor) / (d1 * e2))
        }
        TheoryConstants::ScNc {
            d1,
            initial_potential,
            potential_ceiling,
        } => {
            if !(d1 > 0.0) {
                return Err(Error::Infeasible(format!(
                    "rate constant d1 = {d1} is not positive"
                )));
            }
            Ok((potential_ceiling - initial_potential) / (d1 * e2))
        }
        TheoryConstants::NcC {
            rho_bar,
            tau,
            l12,
            d3,
            d4,
            sigma_hat_y,
        } => {
            let first = (64.0 * rho_bar * (tau - 2.0) * l12 * l12 * d3 * d4 / e2 + 2.0).powi(2);
            let second = sigma_hat_y.powi(4) / (rho_bar.powi(4) * e2 * e2) + 1.0;
            Ok(first.max(second))
        }
        TheoryConstants::CNc {
            zeta_bar,
            tau,
            l21,
            d3,
            d4,
            sigma_hat_x,
        } => {
            let first = (64.0 * zeta_bar * (tau - 2.0) * l21 * l21 * d3 * d4 / e2 + 1.0).powi(2);
            let second = sigma_hat_x.powi(4) / (zeta_bar.powi(4) * e2 * e2) + 1.0;
            Ok(first.max(second))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn nc_sc_bound_example() {
        let c = TheoryConstants::NcSc {
            d1: 0.01,
            initial_potential: 10.0,
            potential_floor: 0.0,
        };
        assert_relative_eq!(compute_bound(&c, 0.1).unwrap(), 1e5, max_relative = 1e-12);
    }

    #[test]
    fn nc_c_bound_scales_as_inverse_fourth_power() {
        let c = TheoryConstants::NcC {
            rho_bar: 1.0,
            tau: 3.0,
            l12: 1.0,
            d3: 2.0,
            d4: 5.0,
            sigma_hat_y: 1.0,
        };
        let t1 = compute_bound(&c, 1e-2).unwrap();
        let t2 = compute_bound(&c, 1e-3).unwrap();
        assert_relative_eq!(t2 / t1, 1e4, max_relative = 1e-3);
    }

    #[test]
    fn nonpositive_d1_is_infeasible() {
        let c = TheoryConstants::NcSc {
            d1: -1.0,
            initial_potential: 1.0,
            potential_floor: 0.0,
        };
        assert!(matches!(compute_bound(&c, 0.1), Err(Error::Infeasible(_))));
    }
}
