//! Benchmark harness: config parsing, parallel suites, trace files,
//! summaries and rate experiments.

mod config;
mod csv_io;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{
    parse_config, parse_config_with, Overrides, RegimeChoice, RunSpec, DEFAULT_EPS,
    DEFAULT_EPS_GRID, DEFAULT_MAX_ITER, DEFAULT_TAU,
};
pub use csv_io::{read_trace_csv, write_trace_csv, COLUMNS};

use crate::error::{invalid, Error, Result};
use crate::objective::MinimaxProblem;
use crate::schedules::RegimeConfig;
use crate::solver::{run_gda, run_with, Init, RunOptions, SolverKind, SolverTrace, StopReason};
use crate::verify::{compute_bound, rate_slope, TheoryConstants};

/// Outcome of one run as stored in `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub id: String,
    pub problem: String,
    pub solver: SolverKind,
    pub config: Option<String>,
    pub eps: f64,
    pub max_iter: usize,
    pub iterations: usize,
    pub t_eps: Option<usize>,
    pub final_gap: Option<f64>,
    pub reason: Option<StopReason>,
    pub monitor_pass: Option<bool>,
    pub monitor_failures: Vec<String>,
    pub bound: Option<f64>,
    /// bound / T(eps) when both exist
    pub bound_ratio: Option<f64>,
    pub bound_note: Option<String>,
    pub floored_iterations: usize,
    pub wall_time_secs: f64,
    pub trace_file: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteSummary {
    /// echo of the config file and command-line overrides
    pub config: SuiteEcho,
    pub parallelism: usize,
    pub runs: Vec<RunSummary>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteEcho {
    pub path: Option<String>,
    pub text: String,
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
}

fn options(spec: &RunSpec) -> RunOptions {
    RunOptions::new(spec.eps, spec.max_iter)
        .init(spec.init.clone())
        .monitor(spec.monitor && spec.solver == SolverKind::Agp)
}

/// Runs one spec without touching the file system.
pub fn execute(spec: &RunSpec) -> (RunSummary, Option<SolverTrace>) {
    let start = Instant::now();
    let result = match spec.solver {
        SolverKind::Agp => match &spec.config {
            Some(cfg) => run_with(&spec.problem, cfg, &options(spec)),
            None => Err(Error::UnsupportedRegime(format!(
                "run '{}' has no schedule",
                spec.id
            ))),
        },
        SolverKind::Gda => spec
            .gda_steps()
            .and_then(|(sx, sy)| run_gda(&spec.problem, sx, sy, &options(spec))),
    };
    let wall = start.elapsed().as_secs_f64();
    let mut s = RunSummary {
        id: spec.id.clone(),
        problem: spec.problem_descriptor.clone(),
        solver: spec.solver,
        config: spec.config.map(|c| c.to_string()),
        eps: spec.eps,
        max_iter: spec.max_iter,
        iterations: 0,
        t_eps: None,
        final_gap: None,
        reason: None,
        monitor_pass: None,
        monitor_failures: Vec::new(),
        bound: None,
        bound_ratio: None,
        bound_note: None,
        floored_iterations: 0,
        wall_time_secs: wall,
        trace_file: None,
        error: None,
    };
    let trace = match result {
        Ok(t) => t,
        Err(e) => {
            s.error = Some(e.to_string());
            return (s, None);
        }
    };
    s.iterations = trace.len();
    s.t_eps = trace.t_eps;
    s.final_gap = Some(trace.final_gap());
    s.reason = Some(trace.reason);
    s.floored_iterations = trace.floored_iterations;
    if let Some(m) = &trace.monitor {
        s.monitor_pass = Some(m.pass);
        s.monitor_failures = m
            .entries
            .iter()
            .filter(|e| !e.pass)
            .map(|e| e.id.clone())
            .collect();
    }
    if spec.solver == SolverKind::Agp {
        if let Some(cfg) = &spec.config {
            match bound_for(&spec.problem, cfg, &spec.init, spec.eps) {
                Ok(b) => {
                    s.bound = Some(b);
                    s.bound_ratio = trace.t_eps.map(|t| b / t.max(1) as f64);
                }
                Err(e) => s.bound_note = Some(e.to_string()),
            }
        }
    }
    (s, Some(trace))
}

/// Iteration bound for `eps` from the constants of `problem` and `cfg`.
pub fn bound_for(
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
    init: &Init,
    eps: f64,
) -> Result<f64> {
    let c = TheoryConstants::assemble(problem, cfg, init)?;
    compute_bound(&c, eps)
}

fn write_trace(out_dir: &Path, id: &str, trace: &SolverTrace) -> Result<PathBuf> {
    let path = out_dir.join(format!("{id}.csv"));
    write_trace_csv(BufWriter::new(File::create(&path)?), &trace.records)?;
    Ok(path)
}

fn pool(parallelism: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))
}

/// Runs every spec, writing `<out_dir>/<id>.csv` per run. Results come back
/// in spec order; failures are recorded per run and do not stop the suite.
pub fn run_suite(specs: &[RunSpec], parallelism: usize, out_dir: &Path) -> Result<Vec<RunSummary>> {
    check_unique_ids(specs)?;
    fs::create_dir_all(out_dir)?;
    let summaries = pool(parallelism)?.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let (mut s, trace) = execute(spec);
                if let Some(t) = trace {
                    match write_trace(out_dir, &spec.id, &t) {
                        Ok(p) => {
                            s.trace_file = p.file_name().map(|f| f.to_string_lossy().into_owned())
                        }
                        Err(e) => s.error = Some(format!("writing trace: {e}")),
                    }
                }
                s
            })
            .collect()
    });
    Ok(summaries)
}

fn check_unique_ids(specs: &[RunSpec]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for s in specs {
        if !seen.insert(s.id.as_str()) {
            return Err(Error::Config {
                line: s.line,
                message: format!("duplicate run name '{}'", s.id),
            });
        }
    }
    Ok(())
}

pub fn write_summary(out_dir: &Path, summary: &SuiteSummary) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("summary.json");
    serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), summary)?;
    Ok(path)
}

/// 3 if any monitor failed, else 2 if any run did not converge, else 0.
pub fn exit_code(runs: &[RunSummary]) -> i32 {
    if runs.iter().any(|r| r.monitor_pass == Some(false)) {
        3
    } else if runs
        .iter()
        .any(|r| r.error.is_some() || r.reason != Some(StopReason::Converged))
    {
        2
    } else {
        0
    }
}

/// Fixed-width table of run outcomes.
pub fn format_table(runs: &[RunSummary]) -> String {
    let mut out = format!(
        "{:<34} {:>5} {:>9} {:>10} {:>12} {:>8} {:>12}  {}\n",
        "run", "alg", "eps", "T(eps)", "final gap", "monitor", "bound", "status"
    );
    for r in runs {
        let status = match (&r.error, r.reason) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(StopReason::Converged)) => "converged".to_string(),
            (None, _) => "max_iter".to_string(),
        };
        out.push_str(&format!(
            "{:<34} {:>5} {:>9.1e} {:>10} {:>12} {:>8} {:>12}  {}\n",
            r.id,
            r.solver.to_string(),
            r.eps,
            r.t_eps.map_or("-".to_string(), |t| t.to_string()),
            r.final_gap.map_or("-".to_string(), |g| format!("{g:.4e}")),
            match r.monitor_pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "-",
            },
            r.bound.map_or("-".to_string(), |b| format!("{b:.3e}")),
            status
        ));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub eps: f64,
    pub t_eps: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub problem: String,
    pub config: String,
    pub rows: Vec<RateRow>,
    /// slope of ln T against ln(1/eps) over converged rows
    pub slope: Option<f64>,
    /// some eps in the grid was not reached within max_iter
    pub partial: bool,
}

/// One run down to the smallest eps; first-hit indices for every grid value.
pub fn rate_experiment(
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
    eps_grid: &[f64],
    max_iter: usize,
    init: &Init,
) -> Result<RateTable> {
    check_grid(eps_grid)?;
    let grid = eps_grid;
    let eps_min = grid[grid.len() - 1];
    let trace = run_with(
        problem,
        cfg,
        &RunOptions::new(eps_min, max_iter).init(init.clone()),
    )?;
    let rows: Vec<RateRow> = grid
        .iter()
        .map(|&eps| RateRow {
            eps,
            t_eps: trace.first_hit(eps),
        })
        .collect();
    let hits: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.t_eps.map(|t| (r.eps, t as f64)))
        .collect();
    let slope = if hits.len() >= 3 {
        rate_slope(&hits).ok()
    } else {
        None
    };
    Ok(RateTable {
        problem: problem.name.clone(),
        config: cfg.to_string(),
        partial: rows.iter().any(|r| r.t_eps.is_none()),
        rows,
        slope,
    })
}

/// At least three finite positive values, strictly decreasing.
pub fn check_grid(eps_grid: &[f64]) -> Result<()> {
    if eps_grid.len() < 3 {
        return Err(invalid(format!(
            "eps grid needs at least 3 values, got {}",
            eps_grid.len()
        )));
    }
    if eps_grid.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(invalid("eps grid entries must be finite and positive"));
    }
    if eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("eps grid must be strictly decreasing"));
    }
    Ok(())
}

/// Runs each spec twice, once with AGP and once with GDA.
pub fn compare_suite(
    specs: &[RunSpec],
    parallelism: usize,
    out_dir: &Path,
) -> Result<Vec<(RunSummary, RunSummary)>> {
    let mut paired = Vec::with_capacity(specs.len() * 2);
    for s in specs {
        let mut a = s.clone();
        a.solver = SolverKind::Agp;
        a.id = format!("{}-agp", s.id);
        let mut g = s.clone();
        g.solver = SolverKind::Gda;
        g.monitor = false;
        g.id = format!("{}-gda", s.id);
        paired.push(a);
        paired.push(g);
    }
    let runs = run_suite(&paired, parallelism, out_dir)?;
    let mut it = runs.into_iter();
    let mut out = Vec::new();
    while let (Some(a), Some(g)) = (it.next(), it.next()) {
        out.push((a, g));
    }
    Ok(out)
}
