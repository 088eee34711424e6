//! Alternating gradient projection and the simultaneous baseline.

mod potential;
mod trace;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Block, Error, Result};
use crate::geometry::Vector;
use crate::objective::{MinimaxProblem, RegularizedObjective};
use crate::schedules::{params_at, RegimeConfig, StepParams};
use crate::verify::MonitorAccumulator;

pub use potential::{nc_sc_offset, potential_value, PotentialWindow};
pub use trace::{IterationRecord, SolverKind, SolverTrace, StopReason};

/// Current iterate `(x_k, y_k)` plus the previous one when it exists.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub k: usize,
    pub x: Vector,
    pub y: Vector,
    pub x_prev: Option<Vector>,
    pub y_prev: Option<Vector>,
}

impl SolverState {
    /// State at `k = 1`; the point is projected onto the feasible sets.
    pub fn start(problem: &MinimaxProblem, init: &Init) -> Result<Self> {
        let (x, y) = match init {
            Init::ProjectOrigin => (
                Vector::zeros(problem.dim_x()),
                Vector::zeros(problem.dim_y()),
            ),
            Init::Point { x, y } => (Vector::from_column_slice(x), Vector::from_column_slice(y)),
        };
        problem.check_point(&x, &y)?;
        let x = problem.x_set.project(&x)?;
        let y = problem.y_set.project(&y)?;
        Ok(SolverState {
            k: 1,
            x,
            y,
            x_prev: None,
            y_prev: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// projection of the origin onto X x Y
    ProjectOrigin,
    Point {
        x: Vec<f64>,
        y: Vec<f64>,
    },
}

/// Stationarity residual split by block.
#[derive(Clone, Debug, PartialEq)]
pub struct Gap {
    pub gx: Vector,
    pub gy: Vector,
}

impl Gap {
    pub fn norm(&self) -> f64 {
        (self.gx.norm_squared() + self.gy.norm_squared()).sqrt()
    }
}

fn finite_or(v: Vector, k: usize, block: Block) -> Result<Vector> {
    if v.iter().all(|c| c.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NumericFailure { k, block })
    }
}

fn gap_from_grads(
    problem: &MinimaxProblem,
    x: &Vector,
    y: &Vector,
    gx: &Vector,
    gy: &Vector,
    beta: f64,
    gamma: f64,
) -> Gap {
    let px = problem.x_set.project_unchecked(&(x - gx / beta));
    let py = problem.y_set.project_unchecked(&(y + gy / gamma));
    Gap {
        gx: (x - px) * beta,
        gy: (y - py) * gamma,
    }
}

fn check_weights(beta: f64, gamma: f64) -> Result<()> {
    if !(beta > 0.0) || !(gamma > 0.0) || !beta.is_finite() || !gamma.is_finite() {
        return Err(invalid(format!(
            "step weights must be finite and positive, got beta={beta}, gamma={gamma}"
        )));
    }
    Ok(())
}

/// `( beta (x - P_X(x - grad_x f / beta)), gamma (y - P_Y(y + grad_y f / gamma)) )`
pub fn stationarity_gap(
    problem: &MinimaxProblem,
    x: &Vector,
    y: &Vector,
    beta: f64,
    gamma: f64,
) -> Result<Gap> {
    problem.check_point(x, y)?;
    check_weights(beta, gamma)?;
    let gx = finite_or(problem.grad_x(x, y), 0, Block::X)?;
    let gy = finite_or(problem.grad_y(x, y), 0, Block::Y)?;
    Ok(gap_from_grads(problem, x, y, &gx, &gy, beta, gamma))
}

/// The same residual for the regularized objective with `params.b`, `params.c`.
pub fn regularized_gap(
    problem: &MinimaxProblem,
    x: &Vector,
    y: &Vector,
    params: &StepParams,
) -> Result<Gap> {
    problem.check_point(x, y)?;
    check_weights(params.beta, params.gamma)?;
    let (gx, gy) = RegularizedObjective {
        base: problem,
        b: params.b,
        c: params.c,
    }
    .grads(x, y);
    let gx = finite_or(gx, params.k, Block::X)?;
    let gy = finite_or(gy, params.k, Block::Y)?;
    Ok(gap_from_grads(
        problem,
        x,
        y,
        &gx,
        &gy,
        params.beta,
        params.gamma,
    ))
}

/// One alternating step: x first, then y against the fresh x.
pub fn agp_step(
    problem: &MinimaxProblem,
    state: &SolverState,
    params: &StepParams,
) -> Result<SolverState> {
    let (x, y) = (&state.x, &state.y);
    problem.check_point(x, y)?;
    let k = state.k;
    let gx = finite_or(problem.grad_x(x, y), k, Block::X)?;
    let x_new = problem
        .x_set
        .project_unchecked(&(x - (gx + x * params.b) / params.beta));
    let x_new = finite_or(x_new, k, Block::X)?;
    let gy = finite_or(problem.grad_y(&x_new, y), k, Block::Y)?;
    let y_new = problem
        .y_set
        .project_unchecked(&(y + (gy - y * params.c) / params.gamma));
    let y_new = finite_or(y_new, k, Block::Y)?;
    Ok(SolverState {
        k: k + 1,
        x: x_new,
        y: y_new,
        x_prev: Some(x.clone()),
        y_prev: Some(y.clone()),
    })
}

/// Simultaneous projected step; both gradients are taken at the old point.
pub fn gda_step(
    problem: &MinimaxProblem,
    state: &SolverState,
    step_x: f64,
    step_y: f64,
) -> Result<SolverState> {
    let (x, y) = (&state.x, &state.y);
    problem.check_point(x, y)?;
    let k = state.k;
    let gx = finite_or(problem.grad_x(x, y), k, Block::X)?;
    let gy = finite_or(problem.grad_y(x, y), k, Block::Y)?;
    let x_new = finite_or(
        problem.x_set.project_unchecked(&(x - gx * step_x)),
        k,
        Block::X,
    )?;
    let y_new = finite_or(
        problem.y_set.project_unchecked(&(y + gy * step_y)),
        k,
        Block::Y,
    )?;
    Ok(SolverState {
        k: k + 1,
        x: x_new,
        y: y_new,
        x_prev: Some(x.clone()),
        y_prev: Some(y.clone()),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub eps: f64,
    pub max_iter: usize,
    pub init: Init,
    /// keep every iterate in the trace (needed for replaying monitors)
    pub retain_iterates: bool,
    /// run the lemma monitors alongside the solver
    pub monitor: bool,
}

impl RunOptions {
    pub fn new(eps: f64, max_iter: usize) -> Self {
        RunOptions {
            eps,
            max_iter,
            init: Init::ProjectOrigin,
            retain_iterates: false,
            monitor: false,
        }
    }

    pub fn init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn retain_iterates(mut self, yes: bool) -> Self {
        self.retain_iterates = yes;
        self
    }

    pub fn monitor(mut self, yes: bool) -> Self {
        self.monitor = yes;
        self
    }

    fn check(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(invalid(format!(
                "eps must be finite and positive, got {}",
                self.eps
            )));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

/// Runs AGP until the gap drops to `eps` or `max_iter` iterations pass.
pub fn run(
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
    eps: f64,
    max_iter: usize,
    init: Init,
) -> Result<SolverTrace> {
    run_with(problem, cfg, &RunOptions::new(eps, max_iter).init(init))
}

pub fn run_with(
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
    opts: &RunOptions,
) -> Result<SolverTrace> {
    opts.check()?;
    cfg.check()?;
    let data = problem.constants;
    let mut state = SolverState::start(problem, &opts.init)?;
    let mut records: Vec<IterationRecord> = Vec::new();
    let mut iterates = opts.retain_iterates.then(Vec::new);
    let mut monitor = opts.monitor.then(|| MonitorAccumulator::new(problem, cfg));
    let mut t_eps = None;
    let mut t_reg = None;
    let mut floored = 0;
    let uses_y_window = matches!(cfg, RegimeConfig::NcSc { .. } | RegimeConfig::NcC { .. });

    loop {
        let k = state.k;
        let params = params_at(cfg, &data, k)?;
        floored += params.floored as usize;
        let gx = finite_or(problem.grad_x(&state.x, &state.y), k, Block::X)?;
        let gy = finite_or(problem.grad_y(&state.x, &state.y), k, Block::Y)?;
        let gap = gap_from_grads(
            problem,
            &state.x,
            &state.y,
            &gx,
            &gy,
            params.beta,
            params.gamma,
        );
        let unit = gap_from_grads(problem, &state.x, &state.y, &gx, &gy, 1.0, 1.0);
        let reg = gap_from_grads(
            problem,
            &state.x,
            &state.y,
            &(&gx + &state.x * params.b),
            &(&gy - &state.y * params.c),
            params.beta,
            params.gamma,
        );
        let next = agp_step(problem, &state, &params)?;

        // nc_sc at k = 1 takes y_0 = y_1, so its potential starts at f(x_1, y_1)
        let y_prev = match (&state.y_prev, cfg) {
            (Some(p), _) => Some(p),
            (None, RegimeConfig::NcSc { .. }) => Some(&state.y),
            (None, _) => None,
        };
        let window = PotentialWindow {
            k,
            x: &state.x,
            y: &state.y,
            y_prev: if uses_y_window { y_prev } else { None },
            x_next: if uses_y_window { None } else { Some(&next.x) },
        };
        let potential = potential_value(problem, cfg, &window).unwrap_or(f64::NAN);
        let gap_norm = gap.norm();
        let reg_norm = reg.norm();
        records.push(IterationRecord {
            k,
            f_value: problem.value(&state.x, &state.y),
            gap_norm,
            reg_gap_norm: reg_norm,
            beta: params.beta,
            gamma: params.gamma,
            b: params.b,
            c: params.c,
            dx_norm: (&next.x - &state.x).norm(),
            dy_norm: (&next.y - &state.y).norm(),
            potential,
            monitor_slack: f64::NAN,
            gap_x_norm: gap.gx.norm(),
            gap_y_norm: gap.gy.norm(),
            unit_gap_norm: unit.norm(),
        });
        if let Some(m) = monitor.as_mut() {
            if let Some((j, slack)) = m.push(k, &state.x, &state.y) {
                records[j - 1].monitor_slack = slack;
            }
        }
        if let Some(it) = iterates.as_mut() {
            it.push((state.x.clone(), state.y.clone()));
        }
        if t_reg.is_none() && reg_norm <= opts.eps / 2.0 {
            t_reg = Some(k);
        }
        let done = gap_norm <= opts.eps;
        if done {
            t_eps = Some(k);
        }
        if done || k >= opts.max_iter {
            if let Some(m) = monitor.as_mut() {
                if let Some((j, slack)) = m.push(k + 1, &next.x, &next.y) {
                    records[j - 1].monitor_slack = slack;
                }
            }
            if let Some(it) = iterates.as_mut() {
                it.push((next.x.clone(), next.y.clone()));
            }
            return Ok(SolverTrace {
                solver: SolverKind::Agp,
                config: Some(*cfg),
                eps: opts.eps,
                records,
                reason: if done {
                    StopReason::Converged
                } else {
                    StopReason::MaxIter
                },
                t_eps,
                t_reg_half_eps: t_reg,
                floored_iterations: floored,
                final_x: state.x,
                final_y: state.y,
                iterates,
                monitor: monitor.map(MonitorAccumulator::finish),
            });
        }
        state = next;
    }
}

/// Runs simultaneous projected gradient descent-ascent with fixed steps.
///
/// The recorded gap uses weights `1/step_x`, `1/step_y`.
pub fn run_gda(
    problem: &MinimaxProblem,
    step_x: f64,
    step_y: f64,
    opts: &RunOptions,
) -> Result<SolverTrace> {
    opts.check()?;
    if !(step_x > 0.0) || !(step_y > 0.0) || !step_x.is_finite() || !step_y.is_finite() {
        return Err(invalid(format!(
            "gda steps must be finite and positive, got {step_x}, {step_y}"
        )));
    }
    if opts.monitor {
        return Err(Error::Unsupported(
            "the lemma monitors apply to AGP traces only".into(),
        ));
    }
    let (beta, gamma) = (1.0 / step_x, 1.0 / step_y);
    let mut state = SolverState::start(problem, &opts.init)?;
    let mut records = Vec::new();
    let mut iterates = opts.retain_iterates.then(Vec::new);
    loop {
        let k = state.k;
        let gx = finite_or(problem.grad_x(&state.x, &state.y), k, Block::X)?;
        let gy = finite_or(problem.grad_y(&state.x, &state.y), k, Block::Y)?;
        let gap = gap_from_grads(problem, &state.x, &state.y, &gx, &gy, beta, gamma);
        let unit = gap_from_grads(problem, &state.x, &state.y, &gx, &gy, 1.0, 1.0);
        let next = gda_step(problem, &state, step_x, step_y)?;
        let gap_norm = gap.norm();
        records.push(IterationRecord {
            k,
            f_value: problem.value(&state.x, &state.y),
            gap_norm,
            reg_gap_norm: gap_norm,
            beta,
            gamma,
            b: 0.0,
            c: 0.0,
            dx_norm: (&next.x - &state.x).norm(),
            dy_norm: (&next.y - &state.y).norm(),
            potential: f64::NAN,
            monitor_slack: f64::NAN,
            gap_x_norm: gap.gx.norm(),
            gap_y_norm: gap.gy.norm(),
            unit_gap_norm: unit.norm(),
        });
        if let Some(it) = iterates.as_mut() {
            it.push((state.x.clone(), state.y.clone()));
        }
        let done = gap_norm <= opts.eps;
        if done || k >= opts.max_iter {
            if let Some(it) = iterates.as_mut() {
                it.push((next.x.clone(), next.y.clone()));
            }
            let t = done.then_some(k);
            return Ok(SolverTrace {
                solver: SolverKind::Gda,
                config: None,
                eps: opts.eps,
                records,
                reason: if done {
                    StopReason::Converged
                } else {
                    StopReason::MaxIter
                },
                t_eps: t,
                t_reg_half_eps: None,
                floored_iterations: 0,
                final_x: state.x,
                final_y: state.y,
                iterates,
                monitor: None,
            });
        }
        state = next;
    }
}

/// Iterates `(x_1, y_1), ..., (x_{n+1}, y_{n+1})` of `n` AGP steps, ignoring
/// the stopping test.
pub fn trajectory(
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
    init: &Init,
    n: usize,
) -> Result<Vec<(Vector, Vector)>> {
    let mut state = SolverState::start(problem, init)?;
    let mut out = vec![(state.x.clone(), state.y.clone())];
    for _ in 0..n {
        let params = params_at(cfg, &problem.constants, state.k)?;
        state = agp_step(problem, &state, &params)?;
        out.push((state.x.clone(), state.y.clone()));
    }
    Ok(out)
}
