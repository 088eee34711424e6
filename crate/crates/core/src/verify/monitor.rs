//! Runtime checks of the per-iteration descent and potential inequalities.
//!
//! Iterates are fed in order; each inequality is evaluated as soon as the
//! iterates it mentions are available. An inequality `lhs <= rhs` counts as
//! violated at k when `lhs - rhs > 1e-8 (1 + |lhs| + |rhs|)`.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vector;
use crate::objective::{MinimaxProblem, Regime};
use crate::schedules::{decay_start, params_at, regularization_at, RegimeConfig, StepParams};
use crate::solver::{
    potential_value, regularized_gap, stationarity_gap, PotentialWindow, SolverKind, SolverTrace,
};

pub const MONITOR_RTOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorEntry {
    pub id: String,
    pub description: String,
    pub checked: usize,
    pub first_k: Option<usize>,
    pub last_k: Option<usize>,
    /// largest `lhs - rhs` seen (negative when every check had slack)
    pub max_excess: f64,
    /// largest `(lhs - rhs) / tolerance`; above 1 means a violation
    pub worst_ratio: f64,
    pub worst_k: Option<usize>,
    pub pass: bool,
}

impl MonitorEntry {
    fn new(id: &str, description: &str) -> Self {
        MonitorEntry {
            id: id.to_string(),
            description: description.to_string(),
            checked: 0,
            first_k: None,
            last_k: None,
            max_excess: f64::NEG_INFINITY,
            worst_ratio: f64::NEG_INFINITY,
            worst_k: None,
            pass: true,
        }
    }

    pub fn applicable(&self) -> bool {
        self.checked > 0
    }

    fn record(&mut self, k: usize, lhs: f64, rhs: f64) -> f64 {
        let excess = lhs - rhs;
        let tol = MONITOR_RTOL * (1.0 + lhs.abs() + rhs.abs());
        let ratio = if excess.is_nan() {
            f64::INFINITY
        } else {
            excess / tol
        };
        self.checked += 1;
        self.first_k.get_or_insert(k);
        self.last_k = Some(k);
        if excess > self.max_excess || excess.is_nan() {
            self.max_excess = excess;
        }
        if ratio > self.worst_ratio {
            self.worst_ratio = ratio;
            self.worst_k = Some(k);
        }
        if !(ratio <= 1.0) {
            self.pass = false;
        }
        rhs - lhs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorReport {
    pub regime: Regime,
    pub entries: Vec<MonitorEntry>,
    pub pass: bool,
}

impl MonitorReport {
    pub fn entry(&self, id: &str) -> Option<&MonitorEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

impl fmt::Display for MonitorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "monitors ({})", self.regime)?;
        writeln!(
            f,
            "{:<20} {:>8} {:>12} {:>12} {:>8}  result",
            "inequality", "checked", "k range", "worst ratio", "worst k"
        )?;
        for e in &self.entries {
            let range = match (e.first_k, e.last_k) {
                (Some(a), Some(b)) => format!("{a}..{b}"),
                _ => "-".to_string(),
            };
            let ratio = if e.applicable() {
                format!("{:.3e}", e.worst_ratio)
            } else {
                "-".to_string()
            };
            let status = if !e.applicable() {
                "n/a"
            } else if e.pass {
                "pass"
            } else {
                "FAIL"
            };
            writeln!(
                f,
                "{:<20} {:>8} {:>12} {:>12} {:>8}  {}",
                e.id,
                e.checked,
                range,
                ratio,
                e.worst_k.map_or("-".to_string(), |k| k.to_string()),
                status
            )?;
        }
        write!(f, "overall: {}", if self.pass { "pass" } else { "FAIL" })
    }
}

/// Index of the main potential inequality in each regime's entry list.
const MAIN: usize = 2;

/// Incremental evaluator of the regime inequalities.
pub struct MonitorAccumulator<'a> {
    problem: &'a MinimaxProblem,
    cfg: RegimeConfig,
    frames: VecDeque<(usize, Vector, Vector)>,
    entries: Vec<MonitorEntry>,
    gate: usize,
}

impl<'a> MonitorAccumulator<'a> {
    pub fn new(problem: &'a MinimaxProblem, cfg: &RegimeConfig) -> Self {
        let entries = match cfg.regime() {
            Regime::NcSc => vec![
                MonitorEntry::new("x_descent", "x-step decreases f by (eta/2)|dx|^2"),
                MonitorEntry::new("joint_recursion", "one-step change of f(x_k, y_k)"),
                MonitorEntry::new("potential_descent", "potential decreases"),
                MonitorEntry::new("gap_potential", "d1 |gap_k|^2 <= F_k - F_{k+1}"),
            ],
            Regime::NcC => vec![
                MonitorEntry::new(
                    "x_descent",
                    "x-step decreases f by (eta_bar + beta_bar_k/2)|dx|^2",
                ),
                MonitorEntry::new("joint_recursion", "one-step change of f(x_k, y_k)"),
                MonitorEntry::new("potential_descent", "regularized potential recursion"),
                MonitorEntry::new("bridge", "|gap| <= |regularized gap| + c_{k-1}|y_k|"),
            ],
            Regime::ScNc => vec![
                MonitorEntry::new("y_ascent", "y-step increases f by (nu/2)|dy|^2"),
                MonitorEntry::new("joint_recursion", "one-step change of f(x_{k+1}, y_k)"),
                MonitorEntry::new("potential_ascent", "potential increases"),
                MonitorEntry::new("gap_potential", "d1 |gap_k|^2 <= F_{k+1} - F_k"),
            ],
            Regime::CNc => vec![
                MonitorEntry::new(
                    "y_ascent",
                    "y-step increases f by (nu_bar + gamma_bar_k/2)|dy|^2",
                ),
                MonitorEntry::new("joint_recursion", "one-step change of f(x_{k+1}, y_k)"),
                MonitorEntry::new("potential_ascent", "regularized potential recursion"),
                MonitorEntry::new("bridge", "|gap| <= |regularized gap| + q_{k-1}|x_k|"),
            ],
        };
        let gate = match *cfg {
            RegimeConfig::NcC { rho_bar, .. } => decay_start(rho_bar).unwrap_or(usize::MAX).max(3),
            RegimeConfig::CNc { zeta_bar, .. } => {
                decay_start(zeta_bar).unwrap_or(usize::MAX).max(2)
            }
            _ => 1,
        };
        MonitorAccumulator {
            problem,
            cfg: *cfg,
            frames: VecDeque::with_capacity(4),
            entries,
            gate,
        }
    }

    fn x(&self, i: usize) -> Vector {
        self.frame(i).1.clone()
    }

    fn y(&self, i: usize) -> Vector {
        self.frame(i).2.clone()
    }

    fn frame(&self, i: usize) -> &(usize, Vector, Vector) {
        self.frames
            .iter()
            .find(|f| f.0 == i)
            .expect("frame in window")
    }

    fn has(&self, i: usize) -> bool {
        i >= 1 && self.frames.iter().any(|f| f.0 == i)
    }

    fn params(&self, k: usize) -> Option<StepParams> {
        params_at(&self.cfg, &self.problem.constants, k).ok()
    }

    fn f(&self, x: &Vector, y: &Vector) -> f64 {
        self.problem.value(x, y)
    }

    fn potential(&self, k: usize) -> Option<f64> {
        let x_window = matches!(
            self.cfg,
            RegimeConfig::NcSc { .. } | RegimeConfig::NcC { .. }
        );
        let (x, y) = (self.x(k), self.y(k));
        let y_prev = (x_window && self.has(k - 1)).then(|| self.y(k - 1));
        let x_next = (!x_window && self.has(k + 1)).then(|| self.x(k + 1));
        let w = PotentialWindow {
            k,
            x: &x,
            y: &y,
            y_prev: y_prev.as_ref(),
            x_next: x_next.as_ref(),
        };
        potential_value(self.problem, &self.cfg, &w)
    }

    /// Feeds `(x_m, y_m)`. Returns `(k, rhs - lhs)` when the main potential
    /// inequality at some index k was just evaluated.
    pub fn push(&mut self, m: usize, x: &Vector, y: &Vector) -> Option<(usize, f64)> {
        if self.frames.len() == 4 {
            self.frames.pop_front();
        }
        self.frames.push_back((m, x.clone(), y.clone()));
        match self.cfg {
            RegimeConfig::NcSc { eta, rho } => self.nc_sc(m, eta, rho),
            RegimeConfig::NcC {
                eta_bar, rho_bar, ..
            } => self.nc_c(m, eta_bar, rho_bar),
            RegimeConfig::ScNc { zeta, nu } => self.sc_nc(m, zeta, nu),
            RegimeConfig::CNc {
                zeta_bar, nu_bar, ..
            } => self.c_nc(m, zeta_bar, nu_bar),
        }
    }

    fn gap_sq(&self, k: usize) -> Option<f64> {
        let p = self.params(k)?;
        stationarity_gap(self.problem, &self.x(k), &self.y(k), p.beta, p.gamma)
            .ok()
            .map(|g| g.norm().powi(2))
    }

    fn bridge(&mut self, m: usize, weight: f64, norm: f64) {
        let Some(p) = self.params(m) else { return };
        let (Ok(g), Ok(gr)) = (
            stationarity_gap(self.problem, &self.x(m), &self.y(m), p.beta, p.gamma),
            regularized_gap(self.problem, &self.x(m), &self.y(m), &p),
        ) else {
            return;
        };
        self.entries[3].record(m, g.norm(), gr.norm() + weight * norm);
    }

    fn nc_sc(&mut self, m: usize, eta: f64, rho: f64) -> Option<(usize, f64)> {
        let d = self.problem.constants;
        let l12s = d.l12 * d.l12;
        let mut main = None;
        if m >= 2 {
            let k = m - 1;
            let (xk, yk, xn, yn) = (self.x(k), self.y(k), self.x(k + 1), self.y(k + 1));
            let dx2 = (&xn - &xk).norm_squared();
            let dyn2 = (&yn - &yk).norm_squared();
            let lhs = self.f(&xn, &yk) - self.f(&xk, &yk);
            self.entries[0].record(k, lhs, -(eta / 2.0) * dx2);
            if k >= 2 {
                let dyk2 = (&yk - &self.y(k - 1)).norm_squared();
                let lhs = self.f(&xn, &yn) - self.f(&xk, &yk);
                let rhs = -(eta / 2.0 - l12s * rho / 2.0) * dx2
                    - (d.mu / 2.0 - 1.0 / rho) * dyn2
                    - (d.mu - 1.0 / (2.0 * rho) - rho * d.l_y * d.l_y / 2.0) * dyk2;
                self.entries[1].record(k, lhs, rhs);

                let a = eta / 2.0 - rho * l12s / 2.0 - 2.0 * l12s / (rho * d.mu * d.mu);
                let b = (3.0 * d.mu - rho * d.l_y * d.l_y) / 2.0
                    + (d.mu - 4.0 * rho * d.l_y * d.l_y) / (2.0 * rho * d.mu);
                if let (Some(fk), Some(fn_)) = (self.potential(k), self.potential(k + 1)) {
                    let slack = self.entries[MAIN].record(k, fn_ - fk, -a * dx2 - b * dyn2);
                    let d1 = a.min(b) / (eta * eta + 2.0 * l12s).max(2.0 / (rho * rho));
                    if let Some(g2) = self.gap_sq(k) {
                        self.entries[3].record(k, d1 * g2, fk - fn_);
                    }
                    main = Some((k, slack));
                }
            }
        }
        main
    }

    fn nc_c(&mut self, m: usize, eta_bar: f64, rho_bar: f64) -> Option<(usize, f64)> {
        let d = self.problem.constants;
        let l12s = d.l12 * d.l12;
        let cfg = self.cfg;
        let c = |j: usize| regularization_at(&cfg, j);
        let c_prev = if m >= 2 { c(m - 1) } else { c(1) };
        let ym_norm = self.y(m).norm();
        self.bridge(m, c_prev, ym_norm);
        let mut main = None;
        if m >= 2 {
            let k = m - 1;
            let p = self.params(k)?;
            let bbar = p.beta - eta_bar;
            let (xk, yk, xn, yn) = (self.x(k), self.y(k), self.x(k + 1), self.y(k + 1));
            let dx2 = (&xn - &xk).norm_squared();
            let dyn2 = (&yn - &yk).norm_squared();
            let lhs = self.f(&xn, &yk) - self.f(&xk, &yk);
            self.entries[0].record(k, lhs, -(eta_bar + bbar / 2.0) * dx2);
            if k >= 2 {
                let dyk2 = (&yk - &self.y(k - 1)).norm_squared();
                let (yk2, yn2) = (yk.norm_squared(), yn.norm_squared());
                let lhs = self.f(&xn, &yn) - self.f(&xk, &yk);
                let rhs = -(eta_bar + bbar / 2.0 - rho_bar * l12s / 2.0) * dx2
                    + (1.0 / rho_bar - (c(k - 1) - c(k)) / 2.0) * dyn2
                    + dyk2 / (2.0 * rho_bar)
                    + c(k - 1) / 2.0 * (yn2 - yk2);
                self.entries[1].record(k, lhs, rhs);

                if k >= self.gate {
                    if let (Some(fk), Some(fn_)) = (self.potential(k), self.potential(k + 1)) {
                        let ck = c(k);
                        let rhs = -(eta_bar + bbar / 2.0
                            - rho_bar * l12s / 2.0
                            - 8.0 * l12s / (rho_bar * ck * ck))
                            * dx2
                            - dyn2 / (10.0 * rho_bar)
                            + (4.0 / rho_bar) * (c(k - 2) / c(k - 1) - c(k - 1) / ck) * yk2
                            + (c(k - 1) - ck) / 2.0 * yn2;
                        main = Some((k, self.entries[MAIN].record(k, fn_ - fk, rhs)));
                    }
                }
            }
        }
        main
    }

    fn sc_nc(&mut self, m: usize, zeta: f64, nu: f64) -> Option<(usize, f64)> {
        let d = self.problem.constants;
        let l21s = d.l21 * d.l21;
        let mut main = None;
        if m >= 2 {
            let k = m - 1;
            let (xn, yk, yn) = (self.x(k + 1), self.y(k), self.y(k + 1));
            let gain = self.f(&xn, &yn) - self.f(&xn, &yk);
            self.entries[0].record(k, (nu / 2.0) * (&yn - &yk).norm_squared(), gain);
        }
        if m >= 3 {
            let k = m - 2;
            let (xk, x1, x2) = (self.x(k), self.x(k + 1), self.x(k + 2));
            let (yk, y1) = (self.y(k), self.y(k + 1));
            let dy2 = (&y1 - &yk).norm_squared();
            let dx_new = (&x2 - &x1).norm_squared();
            let dx_old = (&x1 - &xk).norm_squared();
            let gain = self.f(&x2, &y1) - self.f(&x1, &yk);
            let bound = (nu / 2.0 - l21s * zeta / 2.0) * dy2
                + (d.theta / 2.0 - 1.0 / zeta) * dx_new
                + (d.theta - 1.0 / (2.0 * zeta) - zeta * d.l_x * d.l_x / 2.0) * dx_old;
            self.entries[1].record(k, bound, gain);

            let a = nu / 2.0 - zeta * l21s / 2.0 - 2.0 * l21s / (zeta * d.theta * d.theta);
            let b = (3.0 * d.theta - zeta * d.l_x * d.l_x) / 2.0
                + (d.theta - 4.0 * zeta * d.l_x * d.l_x) / (2.0 * zeta * d.theta);
            if let (Some(fk), Some(fn_)) = (self.potential(k), self.potential(k + 1)) {
                let slack = self.entries[MAIN].record(k, a * dy2 + b * dx_old, fn_ - fk);
                let d1 = a.min(b) / (1.0 / (zeta * zeta) + 2.0 * d.l12 * d.l12).max(2.0 * nu * nu);
                if let Some(g2) = self.gap_sq(k) {
                    self.entries[3].record(k, d1 * g2, fn_ - fk);
                }
                main = Some((k, slack));
            }
        }
        main
    }

    fn c_nc(&mut self, m: usize, zeta_bar: f64, nu_bar: f64) -> Option<(usize, f64)> {
        let d = self.problem.constants;
        let l21s = d.l21 * d.l21;
        let cfg = self.cfg;
        let q = |j: usize| regularization_at(&cfg, j);
        let q_prev = if m >= 2 { q(m - 1) } else { q(1) };
        let xm_norm = self.x(m).norm();
        self.bridge(m, q_prev, xm_norm);
        let mut main = None;
        if m >= 2 {
            let k = m - 1;
            let gbar = self.params(k)?.gamma - nu_bar;
            let (xn, yk, yn) = (self.x(k + 1), self.y(k), self.y(k + 1));
            let gain = self.f(&xn, &yn) - self.f(&xn, &yk);
            self.entries[0].record(k, (nu_bar + gbar / 2.0) * (&yn - &yk).norm_squared(), gain);
        }
        if m >= 3 && m - 2 >= 2 {
            let k = m - 2;
            let gbar = self.params(k)?.gamma - nu_bar;
            let (xk, x1, x2) = (self.x(k), self.x(k + 1), self.x(k + 2));
            let (yk, y1) = (self.y(k), self.y(k + 1));
            let dy2 = (&y1 - &yk).norm_squared();
            let dx_new = (&x2 - &x1).norm_squared();
            let dx_old = (&x1 - &xk).norm_squared();
            let (x1n, x2n) = (x1.norm_squared(), x2.norm_squared());
            let gain = self.f(&x2, &y1) - self.f(&x1, &yk);
            let bound = (nu_bar + gbar / 2.0 - l21s * zeta_bar / 2.0) * dy2
                + ((q(k - 1) - q(k)) / 2.0 - 1.0 / zeta_bar) * dx_new
                - dx_old / (2.0 * zeta_bar)
                - q(k - 1) / 2.0 * (x2n - x1n);
            self.entries[1].record(k, bound, gain);

            if k >= self.gate {
                if let (Some(fk), Some(fn_)) = (self.potential(k), self.potential(k + 1)) {
                    let qk = q(k);
                    let bound = (nu_bar + gbar / 2.0
                        - zeta_bar * l21s / 2.0
                        - 8.0 * l21s / (zeta_bar * qk * qk))
                        * dy2
                        + (qk - q(k - 1)) / 2.0 * x2n
                        + dx_old / (10.0 * zeta_bar)
                        + (4.0 / zeta_bar) * (qk / q(k + 1) - q(k - 1) / qk) * x2n;
                    main = Some((k, self.entries[MAIN].record(k, bound, fn_ - fk)));
                }
            }
        }
        main
    }

    pub fn finish(self) -> MonitorReport {
        let pass = self.entries.iter().all(|e| e.pass);
        MonitorReport {
            regime: self.cfg.regime(),
            entries: self.entries,
            pass,
        }
    }
}

/// Replays a retained AGP trace through the monitors.
pub fn lemma_monitor(
    trace: &SolverTrace,
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
) -> Result<MonitorReport> {
    if trace.solver != SolverKind::Agp {
        return Err(Error::Unsupported(format!(
            "monitors apply to AGP traces, got a {} trace",
            trace.solver
        )));
    }
    let its = trace
        .iterates
        .as_ref()
        .ok_or_else(|| Error::InvalidTrace("trace was recorded without iterates".into()))?;
    if its.len() != trace.records.len() + 1 && !(its.len() <= 1 && trace.records.is_empty()) {
        return Err(Error::InvalidTrace(format!(
            "expected {} iterates for {} records, found {}",
            trace.records.len() + 1,
            trace.records.len(),
            its.len()
        )));
    }
    let mut acc = MonitorAccumulator::new(problem, cfg);
    for (i, (x, y)) in its.iter().enumerate() {
        problem.check_point(x, y)?;
        acc.push(i + 1, x, y);
    }
    Ok(acc.finish())
}
