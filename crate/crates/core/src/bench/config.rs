//! Line-oriented suite configuration.
//!
//! ```text
//! # defaults for every run
//! eps = 1e-4
//! max_iter = 200000
//!
//! problem = quadratic(seed=3, nx=4, ny=3, kind=nc_c)
//! regime = auto
//!
//! problem = bilinear(n=1)
//! regime = nc_c(eta_bar=0.5, rho_bar=1)
//! init = point(x=[1], y=[1])
//! ```
//!
//! Keys before the first `problem` line are defaults; each `problem` line
//! starts a new run. `#` starts a comment.

use serde::{Deserialize, Serialize};

use crate::descriptor::{Call, Value};
use crate::error::{Error, Result};
use crate::geometry::ConstraintSet;
use crate::objective::{zoo, MinimaxProblem, Regime};
use crate::schedules::{auto_configure_for, RegimeConfig};
use crate::solver::{Init, SolverKind};

pub const DEFAULT_EPS: f64 = 1e-3;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
pub const DEFAULT_TAU: f64 = 3.0;
pub const DEFAULT_EPS_GRID: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    /// first tag of the problem, strongly curved regimes preferred
    Auto,
    Tagged(Regime),
    Explicit(RegimeConfig),
}

/// Command-line overrides applied on top of a config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    /// replaces the `seed` argument of every seeded problem
    pub seed: Option<u64>,
}

/// One fully resolved run.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub id: String,
    pub line: usize,
    pub problem_descriptor: String,
    pub problem: MinimaxProblem,
    pub solver: SolverKind,
    pub regime: RegimeChoice,
    /// schedule used by AGP, and to pick default GDA steps
    pub config: Option<RegimeConfig>,
    pub step_x: Option<f64>,
    pub step_y: Option<f64>,
    pub eps: f64,
    pub max_iter: usize,
    pub init: Init,
    pub eps_grid: Vec<f64>,
    pub monitor: bool,
}

impl RunSpec {
    /// GDA steps: explicit, else the reciprocal AGP weights at k = 1.
    pub fn gda_steps(&self) -> Result<(f64, f64)> {
        if let (Some(sx), Some(sy)) = (self.step_x, self.step_y) {
            return Ok((sx, sy));
        }
        let cfg = self.config.ok_or_else(|| {
            Error::InvalidArgument(format!("run '{}': gda needs step_x and step_y", self.id))
        })?;
        let p = crate::schedules::params_at(&cfg, &self.problem.constants, 1)?;
        Ok((
            self.step_x.unwrap_or(1.0 / p.beta),
            self.step_y.unwrap_or(1.0 / p.gamma),
        ))
    }
}

#[derive(Clone, Debug, Default)]
struct Draft {
    problem: Option<(usize, Value)>,
    fields: Vec<(String, usize, Value)>,
}

const KEYS: [&str; 13] = [
    "problem", "name", "solver", "regime", "tau", "eps", "max_iter", "init", "step_x", "step_y",
    "eps_grid", "monitor", "X",
];

fn known(key: &str) -> bool {
    KEYS.contains(&key) || key == "Y"
}

pub fn parse_config(text: &str) -> Result<Vec<RunSpec>> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<Vec<RunSpec>> {
    let mut defaults = Draft::default();
    let mut drafts: Vec<Draft> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected 'key = value', found '{content}'"),
        })?;
        let key = key.trim();
        if !known(key) {
            return Err(Error::Config {
                line,
                message: format!("unknown key '{key}'"),
            });
        }
        let value = Value::parse(value.trim()).map_err(|e| Error::Config {
            line,
            message: strip(e),
        })?;
        if key == "problem" {
            drafts.push(Draft {
                problem: Some((line, value)),
                fields: Vec::new(),
            });
        } else {
            let target = drafts.last_mut().unwrap_or(&mut defaults);
            target.fields.retain(|(k, _, _)| k != key);
            target.fields.push((key.to_string(), line, value));
        }
    }
    drafts
        .iter()
        .enumerate()
        .map(|(idx, d)| resolve(idx, &defaults, d, overrides))
        .collect()
}

fn strip(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}

fn resolve(idx: usize, defaults: &Draft, draft: &Draft, ov: &Overrides) -> Result<RunSpec> {
    let lookup = |key: &str| -> Option<(usize, &Value)> {
        draft
            .fields
            .iter()
            .chain(defaults.fields.iter())
            .find(|(k, _, _)| k == key)
            .map(|(_, l, v)| (*l, v))
    };
    let at = |line: usize| {
        move |e: Error| Error::Config {
            line,
            message: strip(e),
        }
    };
    let cfg_err = |line: usize, message: String| Error::Config { line, message };

    let (pline, pval) = draft.problem.clone().expect("draft has a problem");
    let mut pcall = pval.as_call().ok_or_else(|| {
        cfg_err(
            pline,
            format!("expected a problem descriptor, got '{pval}'"),
        )
    })?;
    if let Some(seed) = ov.seed {
        if pcall.name != "bilinear" {
            set_arg(&mut pcall, "seed", seed as f64);
        }
    }
    let mut problem = zoo::build(&Value::Call(pcall.clone())).map_err(at(pline))?;
    if lookup("X").is_some() || lookup("Y").is_some() {
        let xs = match lookup("X") {
            Some((l, v)) => ConstraintSet::from_descriptor(v).map_err(at(l))?,
            None => problem.x_set.clone(),
        };
        let ys = match lookup("Y") {
            Some((l, v)) => ConstraintSet::from_descriptor(v).map_err(at(l))?,
            None => problem.y_set.clone(),
        };
        problem = problem.with_sets(xs, ys).map_err(at(pline))?;
    }

    let solver = match lookup("solver") {
        None => SolverKind::Agp,
        Some((l, v)) => match v.as_ident() {
            Some("agp") => SolverKind::Agp,
            Some("gda") => SolverKind::Gda,
            _ => {
                return Err(cfg_err(
                    l,
                    format!("solver must be 'agp' or 'gda', got '{v}'"),
                ))
            }
        },
    };

    let number = |key: &str| -> Result<Option<(usize, f64)>> {
        match lookup(key) {
            None => Ok(None),
            Some((l, v)) => v
                .as_f64()
                .map(|x| Some((l, x)))
                .ok_or_else(|| cfg_err(l, format!("{key} must be a number, got '{v}'"))),
        }
    };

    let eps = match ov.eps {
        Some(e) => e,
        None => match number("eps")? {
            Some((l, e)) => {
                if !(e > 0.0) || !e.is_finite() {
                    return Err(cfg_err(l, "eps must be positive".into()));
                }
                e
            }
            None => DEFAULT_EPS,
        },
    };
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(cfg_err(pline, "eps must be positive".into()));
    }
    let max_iter = match ov.max_iter {
        Some(m) => m,
        None => match number("max_iter")? {
            Some((l, m)) => {
                if !(m >= 1.0) || m.fract() != 0.0 || !m.is_finite() {
                    return Err(cfg_err(l, "max_iter must be a positive integer".into()));
                }
                m as usize
            }
            None => DEFAULT_MAX_ITER,
        },
    };
    if max_iter == 0 {
        return Err(cfg_err(pline, "max_iter must be a positive integer".into()));
    }

    let tau = match number("tau")? {
        Some((l, t)) if !(t > 2.0) || !t.is_finite() => {
            return Err(cfg_err(l, "tau must be greater than 2".into()))
        }
        Some((_, t)) => Some(t),
        None => None,
    };

    let (regime_line, regime) = match lookup("regime") {
        None => (pline, RegimeChoice::Auto),
        Some((l, v)) => {
            let choice = match v {
                Value::Ident(s) if s == "auto" => RegimeChoice::Auto,
                Value::Ident(s) => RegimeChoice::Tagged(s.parse().map_err(at(l))?),
                Value::Call(_) => {
                    RegimeChoice::Explicit(RegimeConfig::from_descriptor(v).map_err(at(l))?)
                }
                _ => return Err(cfg_err(l, format!("bad regime '{v}'"))),
            };
            (l, choice)
        }
    };
    let config = resolve_config(&problem, &regime, tau, solver).map_err(at(regime_line))?;

    let init = match lookup("init") {
        None => Init::ProjectOrigin,
        Some((l, v)) => parse_init(v, &problem).map_err(at(l))?,
    };
    let step = |key: &str| -> Result<Option<f64>> {
        match number(key)? {
            Some((l, s)) if !(s > 0.0) || !s.is_finite() => {
                Err(cfg_err(l, format!("{key} must be positive")))
            }
            other => Ok(other.map(|(_, s)| s)),
        }
    };
    let (step_x, step_y) = (step("step_x")?, step("step_y")?);
    if solver == SolverKind::Gda && config.is_none() && (step_x.is_none() || step_y.is_none()) {
        return Err(cfg_err(
            pline,
            "gda needs step_x and step_y when no regime applies".into(),
        ));
    }

    let eps_grid = match lookup("eps_grid") {
        None => DEFAULT_EPS_GRID.to_vec(),
        Some((l, v)) => {
            let g = v
                .as_f64_list()
                .ok_or_else(|| cfg_err(l, "eps_grid must be a list of numbers".into()))?;
            super::check_grid(&g).map_err(at(l))?;
            g
        }
    };
    let monitor = match lookup("monitor") {
        None => solver == SolverKind::Agp,
        Some((l, v)) => match v
            .as_ident()
            .or_else(|| v.as_f64().map(|x| if x != 0.0 { "true" } else { "false" }))
        {
            Some("true") | Some("on") | Some("yes") => true,
            Some("false") | Some("off") | Some("no") => false,
            _ => {
                return Err(cfg_err(
                    l,
                    format!("monitor must be true or false, got '{v}'"),
                ))
            }
        },
    };
    if monitor && solver == SolverKind::Gda {
        return Err(cfg_err(pline, "monitors apply to agp runs only".into()));
    }

    let id = match lookup("name") {
        Some((_, Value::Ident(s))) => s.clone(),
        Some((l, v)) => return Err(cfg_err(l, format!("name must be a bare word, got '{v}'"))),
        None => format!("{:02}-{}-{}", idx + 1, problem.name, solver),
    };

    Ok(RunSpec {
        id,
        line: pline,
        problem_descriptor: pcall.to_string(),
        problem,
        solver,
        regime,
        config,
        step_x,
        step_y,
        eps,
        max_iter,
        init,
        eps_grid,
        monitor,
    })
}

fn set_arg(call: &mut Call, key: &str, v: f64) {
    call.args.retain(|(k, _)| k.as_deref() != Some(key));
    call.args.push((Some(key.to_string()), Value::Number(v)));
}

const AUTO_ORDER: [Regime; 4] = [Regime::NcSc, Regime::ScNc, Regime::NcC, Regime::CNc];

fn resolve_config(
    problem: &MinimaxProblem,
    choice: &RegimeChoice,
    tau: Option<f64>,
    solver: SolverKind,
) -> Result<Option<RegimeConfig>> {
    let regime = match choice {
        RegimeChoice::Explicit(cfg) => return Ok(Some(*cfg)),
        RegimeChoice::Tagged(r) => *r,
        RegimeChoice::Auto => match AUTO_ORDER.into_iter().find(|r| problem.tags.contains(r)) {
            Some(r) => r,
            None if solver == SolverKind::Gda => return Ok(None),
            None => {
                return Err(Error::UnsupportedRegime(format!(
                    "problem '{}' carries no regime tag",
                    problem.name
                )))
            }
        },
    };
    let mut cfg = match auto_configure_for(problem, regime) {
        Ok(c) => c,
        Err(_) if solver == SolverKind::Gda && matches!(choice, RegimeChoice::Auto) => {
            return Ok(None)
        }
        Err(e) => return Err(e),
    };
    if let Some(t) = tau {
        match &mut cfg {
            RegimeConfig::NcC { tau, .. } | RegimeConfig::CNc { tau, .. } => *tau = tau.max(t),
            _ => {}
        }
    }
    Ok(Some(cfg))
}

fn parse_init(v: &Value, problem: &MinimaxProblem) -> Result<Init> {
    match v {
        Value::Ident(s) if s == "project-origin" || s == "origin" => Ok(Init::ProjectOrigin),
        Value::Call(c) if c.name == "point" => {
            c.expect_keys(&["x", "y"])?;
            let x = c.require_list("x")?;
            let y = c.require_list("y")?;
            crate::error::check_dim(problem.dim_x(), x.len())?;
            crate::error::check_dim(problem.dim_y(), y.len())?;
            Ok(Init::Point { x, y })
        }
        _ => Err(Error::InvalidArgument(format!(
            "init must be 'project-origin' or point(x=[..], y=[..]), got '{v}'"
        ))),
    }
}
