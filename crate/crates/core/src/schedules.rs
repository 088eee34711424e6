//! Step-size and regularization schedules for the four curvature regimes.
//!
//! Every iteration uses `x+ = P_X(x - (grad_x f + b x) / beta)` followed by
//! `y+ = P_Y(y + (grad_y f - c y) / gamma)`; a schedule supplies
//! `(beta, gamma, b, c)` for each `k >= 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::descriptor::Value;
use crate::error::{invalid, Error, Result};
use crate::objective::{MinimaxProblem, Regime, SmoothnessData};

/// Tuning constants for one regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum RegimeConfig {
    NcSc {
        eta: f64,
        rho: f64,
    },
    NcC {
        eta_bar: f64,
        rho_bar: f64,
        tau: f64,
    },
    ScNc {
        zeta: f64,
        nu: f64,
    },
    CNc {
        zeta_bar: f64,
        nu_bar: f64,
        tau: f64,
    },
}

/// Parameters of iteration `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepParams {
    pub k: usize,
    pub beta: f64,
    pub gamma: f64,
    pub b: f64,
    pub c: f64,
    /// the growing proximal term hit its floor this iteration
    pub floored: bool,
}

/// Multiplier used whenever a strict inequality needs a concrete margin.
pub const SAFETY: f64 = 1.01;

impl RegimeConfig {
    pub fn regime(&self) -> Regime {
        match self {
            RegimeConfig::NcSc { .. } => Regime::NcSc,
            RegimeConfig::NcC { .. } => Regime::NcC,
            RegimeConfig::ScNc { .. } => Regime::ScNc,
            RegimeConfig::CNc { .. } => Regime::CNc,
        }
    }

    fn values(&self) -> Vec<(&'static str, f64)> {
        match *self {
            RegimeConfig::NcSc { eta, rho } => vec![("eta", eta), ("rho", rho)],
            RegimeConfig::NcC {
                eta_bar,
                rho_bar,
                tau,
            } => vec![("eta_bar", eta_bar), ("rho_bar", rho_bar), ("tau", tau)],
            RegimeConfig::ScNc { zeta, nu } => vec![("zeta", zeta), ("nu", nu)],
            RegimeConfig::CNc {
                zeta_bar,
                nu_bar,
                tau,
            } => vec![("zeta_bar", zeta_bar), ("nu_bar", nu_bar), ("tau", tau)],
        }
    }

    /// Checks signs and finiteness; the structural inequalities live in [`validate`].
    pub fn check(&self) -> Result<()> {
        for (name, v) in self.values() {
            let ok = match name {
                "tau" => v > 2.0,
                _ => v > 0.0,
            };
            if !ok || !v.is_finite() {
                let need = if name == "tau" { "> 2" } else { "> 0" };
                return Err(invalid(format!(
                    "{}: {name} must be finite and {need}, got {v}",
                    self.regime()
                )));
            }
        }
        Ok(())
    }

    pub fn from_descriptor(v: &Value) -> Result<Self> {
        let c = v
            .as_call()
            .ok_or_else(|| invalid(format!("expected a regime descriptor, got '{v}'")))?;
        let cfg = match c.name.as_str() {
            "nc_sc" => {
                c.expect_keys(&["eta", "rho"])?;
                RegimeConfig::NcSc {
                    eta: c.require_f64("eta")?,
                    rho: c.require_f64("rho")?,
                }
            }
            "nc_c" => {
                c.expect_keys(&["eta_bar", "rho_bar", "tau"])?;
                RegimeConfig::NcC {
                    eta_bar: c.require_f64("eta_bar")?,
                    rho_bar: c.require_f64("rho_bar")?,
                    tau: c.f64_or("tau", 3.0)?,
                }
            }
            "sc_nc" => {
                c.expect_keys(&["zeta", "nu"])?;
                RegimeConfig::ScNc {
                    zeta: c.require_f64("zeta")?,
                    nu: c.require_f64("nu")?,
                }
            }
            "c_nc" => {
                c.expect_keys(&["zeta_bar", "nu_bar", "tau"])?;
                RegimeConfig::CNc {
                    zeta_bar: c.require_f64("zeta_bar")?,
                    nu_bar: c.require_f64("nu_bar")?,
                    tau: c.f64_or("tau", 3.0)?,
                }
            }
            other => return Err(invalid(format!("unknown regime '{other}'"))),
        };
        cfg.check()?;
        Ok(cfg)
    }
}

impl fmt::Display for RegimeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.regime())?;
        for (i, (n, v)) in self.values().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        f.write_str(")")
    }
}

impl std::str::FromStr for RegimeConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_descriptor(&Value::parse(s)?)
    }
}

/// Regularization weight `1 / (2 s k^{1/4})` with `s = rho_bar` or `zeta_bar`.
pub fn decaying_weight(scale: f64, k: usize) -> f64 {
    1.0 / (2.0 * scale * (k as f64).powf(0.25))
}

/// `c_k` for nc_c, `q_k` for c_nc; zero otherwise.
pub fn regularization_at(cfg: &RegimeConfig, k: usize) -> f64 {
    match *cfg {
        RegimeConfig::NcC { rho_bar, .. } => decaying_weight(rho_bar, k),
        RegimeConfig::CNc { zeta_bar, .. } => decaying_weight(zeta_bar, k),
        _ => 0.0,
    }
}

/// Unfloored growing part of the proximal weight (`beta_bar_k` or `gamma_bar_k`).
pub fn growing_term(cfg: &RegimeConfig, data: &SmoothnessData, k: usize) -> f64 {
    match *cfg {
        RegimeConfig::NcC {
            eta_bar,
            rho_bar,
            tau,
        } => {
            let c = decaying_weight(rho_bar, k);
            let l2 = data.l12 * data.l12;
            let alpha = (4.0 * tau - 8.0) * l2 / (rho_bar * c * c);
            rho_bar * l2 + 16.0 * l2 / (rho_bar * c * c) + 2.0 * alpha - 2.0 * eta_bar
        }
        RegimeConfig::CNc {
            zeta_bar,
            nu_bar,
            tau,
        } => {
            let q = decaying_weight(zeta_bar, k);
            let l2 = data.l21 * data.l21;
            zeta_bar * l2 + 8.0 * tau * l2 / (zeta_bar * q * q) - 2.0 * nu_bar
        }
        _ => 0.0,
    }
}

pub fn params_at(cfg: &RegimeConfig, data: &SmoothnessData, k: usize) -> Result<StepParams> {
    if k == 0 {
        return Err(invalid("iterations are counted from k = 1"));
    }
    cfg.check()?;
    let p = match *cfg {
        RegimeConfig::NcSc { eta, rho } => StepParams {
            k,
            beta: eta,
            gamma: 1.0 / rho,
            b: 0.0,
            c: 0.0,
            floored: false,
        },
        RegimeConfig::ScNc { zeta, nu } => StepParams {
            k,
            beta: 1.0 / zeta,
            gamma: nu,
            b: 0.0,
            c: 0.0,
            floored: false,
        },
        RegimeConfig::NcC {
            eta_bar, rho_bar, ..
        } => {
            let (bar, floored) = floor(growing_term(cfg, data, k), data.l_x);
            StepParams {
                k,
                beta: eta_bar + bar,
                gamma: 1.0 / rho_bar,
                b: 0.0,
                c: decaying_weight(rho_bar, k),
                floored,
            }
        }
        RegimeConfig::CNc {
            zeta_bar, nu_bar, ..
        } => {
            let (bar, floored) = floor(growing_term(cfg, data, k), data.l_y);
            StepParams {
                k,
                beta: 1.0 / zeta_bar,
                gamma: nu_bar + bar,
                b: decaying_weight(zeta_bar, k),
                c: 0.0,
                floored,
            }
        }
    };
    if !(p.beta > 0.0) || !(p.gamma > 0.0) || !p.beta.is_finite() || !p.gamma.is_finite() {
        return Err(Error::Infeasible(format!(
            "{} at k={k}: step weights beta={} gamma={} must be positive",
            cfg.regime(),
            p.beta,
            p.gamma
        )));
    }
    Ok(p)
}

/// The growing term must exceed the block's Lipschitz constant for the
/// descent estimate; below that it is lifted to `SAFETY * lipschitz`.
fn floor(bar: f64, lipschitz: f64) -> (f64, bool) {
    if bar > lipschitz {
        (bar, false)
    } else {
        (SAFETY * lipschitz, true)
    }
}

/// Default constants for a regime, computed from the problem constants.
pub fn auto_configure(data: &SmoothnessData, regime: Regime) -> Result<RegimeConfig> {
    data.validate()?;
    let d = data;
    let cfg = match regime {
        Regime::NcSc => {
            if !(d.mu > 0.0) {
                return Err(Error::UnsupportedRegime("nc_sc needs mu > 0".into()));
            }
            let rho = d.mu / (4.0 * d.l_y * d.l_y);
            let l2 = d.l12 * d.l12;
            let coupling = l2 * rho + 4.0 * l2 / (rho * d.mu * d.mu);
            RegimeConfig::NcSc {
                eta: SAFETY * d.l_x.max(d.l_y).max(coupling),
                rho,
            }
        }
        Regime::NcC => {
            if !(d.l12 > 0.0) {
                return Err(Error::UnsupportedRegime(
                    "nc_c auto configuration needs L12 > 0".into(),
                ));
            }
            if !(d.l_y > 0.0) {
                return Err(Error::UnsupportedRegime(
                    "nc_c auto configuration sets rho_bar = 1/L_y, undefined for L_y = 0; pass rho_bar explicitly".into(),
                ));
            }
            let rho_bar = 1.0 / d.l_y;
            let base = rho_bar * d.l12 * d.l12;
            // beta_bar_1 = base * (96 + 32 (tau - 3)) with eta_bar = base / 2
            let tau = 3.0f64.max(3.0 + (SAFETY * d.l_x / base - 64.0) / 32.0);
            RegimeConfig::NcC {
                eta_bar: base / 2.0,
                rho_bar,
                tau,
            }
        }
        Regime::ScNc => {
            if !(d.theta > 0.0) {
                return Err(Error::UnsupportedRegime("sc_nc needs theta > 0".into()));
            }
            let zeta = (d.theta / (4.0 * d.l_x * d.l_x)).min(6.0 / d.theta);
            let l2 = d.l21 * d.l21;
            let coupling = l2 * zeta + 4.0 * l2 / (zeta * d.theta * d.theta);
            let nu = SAFETY * d.l_y.max(coupling);
            if !(nu > 0.0) {
                return Err(Error::UnsupportedRegime(
                    "sc_nc needs L_y > 0 or L21 > 0".into(),
                ));
            }
            RegimeConfig::ScNc { zeta, nu }
        }
        Regime::CNc => {
            if !(d.l21 > 0.0) {
                return Err(Error::UnsupportedRegime(
                    "c_nc auto configuration needs L21 > 0".into(),
                ));
            }
            if !(d.l_x > 0.0) {
                return Err(Error::UnsupportedRegime(
                    "c_nc auto configuration sets zeta_bar = 1/L_x, undefined for L_x = 0; pass zeta_bar explicitly".into(),
                ));
            }
            let zeta_bar = 1.0 / d.l_x;
            let base = zeta_bar * d.l21 * d.l21;
            // gamma_bar_1 = 32 tau base with nu_bar = base / 2
            let tau = 3.0f64.max(SAFETY * d.l_y / (32.0 * base) + 1.0);
            RegimeConfig::CNc {
                zeta_bar,
                nu_bar: base / 2.0,
                tau,
            }
        }
    };
    Ok(cfg)
}

/// [`auto_configure`] after checking that the problem carries the regime tag.
pub fn auto_configure_for(problem: &MinimaxProblem, regime: Regime) -> Result<RegimeConfig> {
    if !problem.tags.contains(&regime) {
        let tags: Vec<_> = problem.tags.iter().map(|t| t.name()).collect();
        return Err(Error::UnsupportedRegime(format!(
            "problem '{}' is not tagged {regime} (tags: {})",
            problem.name,
            if tags.is_empty() {
                "none".to_string()
            } else {
                tags.join(", ")
            }
        )));
    }
    auto_configure(&problem.constants, regime)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    LessEq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "<",
            Relation::LessEq => "<=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    pub relation: Relation,
    pub rhs: f64,
    pub pass: bool,
}

/// Outcome of checking a configuration against the structural inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub config: RegimeConfig,
    pub checks: Vec<Check>,
    /// first k from which the regularization decays slowly enough
    pub decay_from: Option<usize>,
    pub pass: bool,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "config: {}", self.config)?;
        writeln!(
            f,
            "{:<34} {:>14} {:>3} {:>14}  result",
            "check", "lhs", "", "rhs"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<34} {:>14.6e} {:>3} {:>14.6e}  {}",
                c.name,
                c.lhs,
                c.relation.to_string(),
                c.rhs,
                if c.pass { "pass" } else { "FAIL" }
            )?;
        }
        if let Some(k0) = self.decay_from {
            writeln!(f, "regularization decay condition holds from k = {k0}")?;
        }
        write!(f, "overall: {}", if self.pass { "pass" } else { "FAIL" })
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, lhs: f64, relation: Relation, rhs: f64) {
        let pass = match relation {
            Relation::Less => lhs < rhs,
            // equality cases such as rho_bar * L_y = 1 must survive rounding
            Relation::LessEq => lhs <= rhs + 1e-12 * rhs.abs().max(lhs.abs()),
        };
        self.0.push(Check {
            name: name.to_string(),
            lhs,
            relation,
            rhs,
            pass,
        });
    }
}

/// Scans for the first k with `1/w_{k+1} - 1/w_k <= scale/10`.
pub fn decay_start(scale: f64) -> Option<usize> {
    (1..=100_000).find(|&k| {
        1.0 / decaying_weight(scale, k + 1) - 1.0 / decaying_weight(scale, k) <= scale / 10.0
    })
}

/// Reports every structural inequality a configuration should satisfy.
/// Never errors; failed inequalities are marked in the report.
pub fn validate(cfg: &RegimeConfig, data: &SmoothnessData) -> ValidationReport {
    use Relation::*;
    let d = data;
    let mut ch = Checks(Vec::new());
    let sign_ok = cfg.check().is_ok();
    let mut decay_from = None;
    match *cfg {
        RegimeConfig::NcSc { eta, rho } => {
            let l2 = d.l12 * d.l12;
            ch.push("mu", 0.0, Less, d.mu);
            ch.push("L_x < eta", d.l_x, Less, eta);
            ch.push("L_y < eta", d.l_y, Less, eta);
            ch.push(
                "L12^2 rho + 4 L12^2/(rho mu^2) < eta",
                l2 * rho + 4.0 * l2 / (rho * d.mu * d.mu),
                Less,
                eta,
            );
            ch.push(
                "rho <= mu/(4 L_y^2)",
                rho,
                LessEq,
                d.mu / (4.0 * d.l_y * d.l_y),
            );
        }
        RegimeConfig::NcC { rho_bar, tau, .. } => {
            let c1 = decaying_weight(rho_bar, 1);
            let l_y_reg = d.l_y + c1;
            ch.push("tau > 2", 2.0, Less, tau);
            if d.l_y > 0.0 {
                ch.push("rho_bar <= 1/L_y", rho_bar, LessEq, 1.0 / d.l_y);
            }
            ch.push(
                "rho_bar <= 2/(L_y' + c_1)",
                rho_bar,
                LessEq,
                2.0 / (l_y_reg + c1),
            );
            ch.push("c_1 <= L_y'", c1, LessEq, l_y_reg);
            ch.push("L_x < beta_bar_1", d.l_x, Less, growing_term(cfg, d, 1));
            decay_from = decay_start(rho_bar);
        }
        RegimeConfig::ScNc { zeta, nu } => {
            let l2 = d.l21 * d.l21;
            ch.push("theta", 0.0, Less, d.theta);
            ch.push("L_y < nu", d.l_y, Less, nu);
            ch.push(
                "L21^2 zeta + 4 L21^2/(zeta theta^2) < nu",
                l2 * zeta + 4.0 * l2 / (zeta * d.theta * d.theta),
                Less,
                nu,
            );
            ch.push(
                "zeta <= theta/(4 L_x^2)",
                zeta,
                LessEq,
                d.theta / (4.0 * d.l_x * d.l_x),
            );
            ch.push("zeta <= 6/theta", zeta, LessEq, 6.0 / d.theta);
        }
        RegimeConfig::CNc { zeta_bar, tau, .. } => {
            let q1 = decaying_weight(zeta_bar, 1);
            let l_x_reg = d.l_x + q1;
            ch.push("tau > 2", 2.0, Less, tau);
            if d.l_x > 0.0 {
                ch.push("zeta_bar <= 1/L_x", zeta_bar, LessEq, 1.0 / d.l_x);
            }
            ch.push(
                "zeta_bar <= 2/(L_x' + q_1)",
                zeta_bar,
                LessEq,
                2.0 / (l_x_reg + q1),
            );
            ch.push("q_1 <= L_x'", q1, LessEq, l_x_reg);
            ch.push("L_y < gamma_bar_1", d.l_y, Less, growing_term(cfg, d, 1));
            decay_from = decay_start(zeta_bar);
        }
    }
    let pass = sign_ok && ch.0.iter().all(|c| c.pass);
    ValidationReport {
        config: *cfg,
        checks: ch.0,
        decay_from,
        pass,
    }
}
