//! Acceptance suite. Prints one `[PASS]` / `[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.

use std::fs;
use std::time::{Duration, Instant};

use agp::bench::{parse_config, read_trace_csv, run_suite, write_trace_csv};
use agp::geometry::{ConstraintSet, Vector};
use agp::objective::{make_quadratic, zoo, Matrix, MinimaxProblem, Regime};
use agp::schedules::{auto_configure_for, RegimeConfig};
use agp::solver::{run_gda, run_with, Init, RunOptions, SolverTrace, StopReason};
use agp::verify::{
    compute_bound, finite_diff_check, saddle_oracle_quadratic, SaddleOracle, TheoryConstants,
    FD_RTOL,
};
use agp::Value;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// A converged run whose bound is checked under criterion 8.
struct BoundCase {
    label: String,
    problem: MinimaxProblem,
    cfg: RegimeConfig,
    init: Init,
    eps: f64,
    t_eps: usize,
}

#[derive(Default)]
struct Ledger {
    bound_cases: Vec<BoundCase>,
}

fn build(text: &str) -> MinimaxProblem {
    zoo::build(&Value::parse(text).expect("descriptor")).expect("zoo instance")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss(r: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::from_fn(n, |_, _| r.sample::<f64, _>(StandardNormal))
}

// ---------------------------------------------------------------- 1

/// Simplex projection by bisection on the threshold `t` in
/// `sum(max(v - t, 0)) = scale`.
fn simplex_by_bisection(v: &Vector, scale: f64) -> Vector {
    let mass = |t: f64| v.iter().map(|&c| (c - t).max(0.0)).sum::<f64>();
    let (mut lo, mut hi) = (v.min() - scale, v.max());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > scale {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    v.map(|c| (c - t).max(0.0))
}

fn random_set(r: &mut ChaCha8Rng, variant: &str, n: usize) -> ConstraintSet {
    match variant {
        "box" => {
            let a = gauss(r, n);
            let b = gauss(r, n);
            ConstraintSet::boxed(
                a.zip_map(&b, f64::min).as_slice().to_vec(),
                a.zip_map(&b, f64::max).as_slice().to_vec(),
            )
            .unwrap()
        }
        "ball" => {
            ConstraintSet::ball(gauss(r, n).as_slice().to_vec(), r.gen_range(0.05..3.0)).unwrap()
        }
        "simplex" => ConstraintSet::simplex(n, r.gen_range(0.1..5.0)).unwrap(),
        "whole" => ConstraintSet::whole_space(n).unwrap(),
        "product" => {
            let k = r.gen_range(1..n.max(2));
            let k = k.min(n - 1).max(1);
            let first = random_set(r, "ball", k);
            let second = random_set(r, "simplex", n - k);
            ConstraintSet::product(vec![first, second]).unwrap()
        }
        _ => unreachable!(),
    }
}

fn criterion_projection() -> Outcome {
    let mut r = rng(1);
    let mut worst = [0.0f64; 4];
    let mut failures = Vec::new();
    for variant in ["box", "ball", "simplex", "whole", "product"] {
        for case in 0..1000 {
            let lo_dim = if variant == "product" { 2 } else { 1 };
            let n = r.gen_range(lo_dim..=10);
            let s = random_set(&mut r, variant, n);
            let v = gauss(&mut r, n) * 4.0;
            let w = gauss(&mut r, n) * 4.0;
            let u = s.project(&(gauss(&mut r, n) * 4.0)).unwrap();
            let pv = s.project(&v).unwrap();
            let pw = s.project(&w).unwrap();
            let expand = (&pv - &pw).norm() - (&v - &w).norm();
            let idem = (s.project(&pv).unwrap() - &pv).amax();
            let optimal = (&pv - &v).norm() - (&u - &v).norm();
            let oracle = match &s {
                ConstraintSet::Simplex { scale, .. } => {
                    (simplex_by_bisection(&v, *scale) - &pv).amax()
                }
                _ => 0.0,
            };
            for (slot, val) in worst.iter_mut().zip([expand, idem, optimal, oracle]) {
                *slot = slot.max(val);
            }
            if expand > 1e-10 || idem > 1e-12 || optimal > 1e-10 || oracle > 1e-10 {
                failures.push(format!("{variant}#{case}"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "5 variants x 1000 cases; worst expansion {:.1e}, idempotence {:.1e}, optimality {:.1e}, simplex oracle {:.1e}{}",
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            if failures.is_empty() { String::new() } else { format!("; failing {:?}", &failures[..failures.len().min(5)]) }
        ),
    )
}

// ---------------------------------------------------------------- 2

fn zoo_instances() -> Vec<String> {
    let mut out = Vec::new();
    for kind in ["nc_sc", "nc_c", "sc_nc", "c_nc", "sc_sc"] {
        for seed in 0..3 {
            out.push(format!(
                "quadratic(seed={seed}, nx={}, ny={}, kind={kind})",
                2 + seed,
                4 - seed as usize
            ));
        }
    }
    out.push("quadratic(seed=5, nx=3, ny=3, kind=sc_sc, bound=inf)".into());
    out.push("bilinear(n=1)".into());
    out.push("bilinear(n=3, scale=2, bound=inf)".into());
    for seed in 0..3 {
        out.push(format!(
            "sine(seed={seed}, nx=3, ny=2, mu={})",
            0.5 + seed as f64
        ));
    }
    for seed in 0..3 {
        out.push(format!("svm(seed={seed}, points={}, dim=2)", 6 + 2 * seed));
    }
    out
}

fn criterion_gradients() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failing = Vec::new();
    let list = zoo_instances();
    for (i, text) in list.iter().enumerate() {
        let p = build(text);
        let rep = finite_diff_check(&p, 100, 1000 + i as u64).unwrap();
        worst = worst.max(rep.max_rel_error());
        if !rep.pass || rep.max_rel_error() > FD_RTOL {
            failing.push(format!("{text}: {:.2e}", rep.max_rel_error()));
        }
    }
    outcome(
        failing.is_empty(),
        format!(
            "{} instances x 100 points, worst relative error {worst:.2e} (tol 1e-6){}",
            list.len(),
            failing_note(&failing)
        ),
    )
}

fn failing_note(f: &[String]) -> String {
    if f.is_empty() {
        String::new()
    } else {
        format!("; failing: {}", f.join(", "))
    }
}

// ---------------------------------------------------------------- 3-5

const MONITOR_ITERS: usize = 10_000;

fn monitored(problem: &MinimaxProblem, cfg: &RegimeConfig, init: Init) -> SolverTrace {
    let opts = RunOptions::new(f64::MIN_POSITIVE, MONITOR_ITERS)
        .init(init)
        .monitor(true);
    run_with(problem, cfg, &opts).expect("monitored run")
}

struct MonitorSummary {
    runs: usize,
    checks: usize,
    worst_ratio: f64,
    failing: Vec<String>,
}

fn monitor_suite(
    cases: &[(String, MinimaxProblem, RegimeConfig, Init)],
    required: &[&str],
    ledger: &mut Ledger,
    exact: bool,
) -> MonitorSummary {
    let mut s = MonitorSummary {
        runs: 0,
        checks: 0,
        worst_ratio: f64::NEG_INFINITY,
        failing: Vec::new(),
    };
    for (label, p, cfg, init) in cases {
        let t = monitored(p, cfg, init.clone());
        let rep = t.monitor.as_ref().expect("monitor report");
        s.runs += 1;
        for id in required {
            let e = rep.entry(id).expect("monitor entry");
            s.checks += e.checked;
            s.worst_ratio = s.worst_ratio.max(e.worst_ratio);
            if !e.pass || !e.applicable() {
                s.failing.push(format!(
                    "{label}/{id} (ratio {:.2e} at k={:?})",
                    e.worst_ratio, e.worst_k
                ));
            }
        }
        if exact {
            let eps = 1e-3;
            if let Some(t_eps) = t.first_hit(eps) {
                ledger.bound_cases.push(BoundCase {
                    label: label.clone(),
                    problem: p.clone(),
                    cfg: *cfg,
                    init: init.clone(),
                    eps,
                    t_eps,
                });
            }
        }
    }
    s
}

fn monitor_outcome(s: MonitorSummary, what: &str) -> Outcome {
    outcome(
        s.failing.is_empty(),
        format!(
            "{} runs x {MONITOR_ITERS} iterations, {} checks of {what}, worst violation ratio {:.2e} (fail above 1){}",
            s.runs,
            s.checks,
            s.worst_ratio,
            failing_note(&s.failing)
        ),
    )
}

fn auto_case(text: &str, regime: Regime) -> (String, MinimaxProblem, RegimeConfig, Init) {
    let p = build(text);
    let cfg = auto_configure_for(&p, regime).expect("auto configuration");
    (text.to_string(), p, cfg, Init::ProjectOrigin)
}

fn criterion_nc_sc(ledger: &mut Ledger) -> Outcome {
    let mut quad = Vec::new();
    for seed in 0..12u64 {
        let (nx, ny) = (1 + seed as usize % 5, 1 + (seed as usize * 3) % 5);
        quad.push(auto_case(
            &format!("quadratic(seed={seed}, nx={nx}, ny={ny}, kind=nc_sc)"),
            Regime::NcSc,
        ));
    }
    let sine: Vec<_> = (0..8u64)
        .map(|seed| {
            auto_case(
                &format!(
                    "sine(seed={seed}, nx={}, ny={}, mu=1)",
                    1 + seed % 5,
                    1 + (seed + 2) % 5
                ),
                Regime::NcSc,
            )
        })
        .collect();
    let required = ["x_descent", "gap_potential"];
    let mut s = monitor_suite(&quad, &required, ledger, true);
    let t = monitor_suite(&sine, &required, ledger, false);
    merge(&mut s, t);
    monitor_outcome(s, "x-descent and d1|gap|^2 <= F_k - F_{k+1}")
}

fn merge(a: &mut MonitorSummary, b: MonitorSummary) {
    a.runs += b.runs;
    a.checks += b.checks;
    a.worst_ratio = a.worst_ratio.max(b.worst_ratio);
    a.failing.extend(b.failing);
}

fn criterion_sc_nc(ledger: &mut Ledger) -> Outcome {
    let cases: Vec<_> = (0..20u64)
        .map(|seed| {
            let (nx, ny) = (1 + (seed as usize * 3) % 5, 1 + seed as usize % 5);
            auto_case(
                &format!(
                    "quadratic(seed={}, nx={nx}, ny={ny}, kind=sc_nc)",
                    100 + seed
                ),
                Regime::ScNc,
            )
        })
        .collect();
    let s = monitor_suite(&cases, &["y_ascent", "gap_potential"], ledger, true);
    monitor_outcome(s, "y-ascent and d1|gap|^2 <= F_{k+1} - F_k")
}

fn criterion_concave(ledger: &mut Ledger) -> Outcome {
    let corner = Init::Point {
        x: vec![1.0],
        y: vec![1.0],
    };
    let mut nc_c = vec![(
        "bilinear(n=1)".to_string(),
        build("bilinear(n=1)"),
        RegimeConfig::NcC {
            eta_bar: 0.5,
            rho_bar: 1.0,
            tau: 3.0,
        },
        corner.clone(),
    )];
    let mut c_nc = vec![(
        "bilinear(n=1)".to_string(),
        build("bilinear(n=1)"),
        RegimeConfig::CNc {
            zeta_bar: 1.0,
            nu_bar: 0.5,
            tau: 3.0,
        },
        corner,
    )];
    for seed in 0..10u64 {
        let (nx, ny) = (1 + seed as usize % 4, 2 + seed as usize % 3);
        nc_c.push(auto_case(
            &format!(
                "quadratic(seed={}, nx={nx}, ny={ny}, kind=nc_c)",
                200 + seed
            ),
            Regime::NcC,
        ));
        c_nc.push(auto_case(
            &format!(
                "quadratic(seed={}, nx={ny}, ny={nx}, kind=c_nc)",
                300 + seed
            ),
            Regime::CNc,
        ));
    }
    let mut s = monitor_suite(
        &nc_c,
        &["x_descent", "potential_descent", "bridge"],
        ledger,
        true,
    );
    let t = monitor_suite(
        &c_nc,
        &["y_ascent", "potential_ascent", "bridge"],
        ledger,
        true,
    );
    merge(&mut s, t);
    monitor_outcome(s, "step, potential (k >= 9) and bridge inequalities")
}

// ---------------------------------------------------------------- 6

fn spd(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Matrix {
    let q = Matrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal))
        .qr()
        .q();
    let d = Matrix::from_diagonal(&Vector::from_fn(n, |_, _| r.gen_range(lo..hi)));
    let m = &q * d * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Solves `A x + B y = -a`, `B' x - C y = c` directly.
fn saddle_by_elimination(
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    la: &Vector,
    lc: &Vector,
) -> (Vector, Vector) {
    // y = C^{-1}(B'x - c); (A + B C^{-1} B') x = -a + B C^{-1} c
    let ci = c.clone().try_inverse().unwrap();
    let lhs = a + b * &ci * b.transpose();
    let rhs = -la + b * &ci * lc;
    let x = lhs.lu().solve(&rhs).unwrap();
    let y = &ci * (b.transpose() * &x - lc);
    (x, y)
}

fn criterion_saddle(ledger: &mut Ledger) -> Outcome {
    let _ = ledger;
    let mut r = rng(6);
    let mut worst_gap: f64 = 0.0;
    let mut worst_dist: f64 = 0.0;
    let mut runs = 0;
    let mut failing = Vec::new();
    for case in 0..10 {
        let (nx, ny) = (r.gen_range(1..=5), r.gen_range(1..=5));
        let a = spd(&mut r, nx, 0.5, 2.0);
        let c = spd(&mut r, ny, 0.5, 2.0);
        let b = Matrix::from_fn(nx, ny, |_, _| r.sample::<f64, _>(StandardNormal));
        let la = gauss(&mut r, nx);
        let lc = gauss(&mut r, ny);
        let (xs, ys) = saddle_by_elimination(&a, &b, &c, &la, &lc);
        match saddle_oracle_quadratic(&a, &b, &c, &la, &lc).unwrap() {
            SaddleOracle::Saddle { x, y } => {
                if (&x - &xs).norm() + (&y - &ys).norm() > 1e-9 {
                    failing.push(format!(
                        "case {case}: library oracle disagrees with elimination"
                    ));
                }
            }
            SaddleOracle::Indefinite => {
                failing.push(format!("case {case}: oracle reported indefinite"))
            }
        }
        let p = make_quadratic(
            a,
            b,
            c,
            la,
            lc,
            ConstraintSet::whole_space(nx).unwrap(),
            ConstraintSet::whole_space(ny).unwrap(),
        )
        .unwrap();
        for regime in [Regime::NcSc, Regime::ScNc] {
            let cfg = auto_configure_for(&p, regime).unwrap();
            let t = run_with(&p, &cfg, &RunOptions::new(1e-6, 2_000_000)).unwrap();
            runs += 1;
            let dist =
                ((&t.final_x - &xs).norm_squared() + (&t.final_y - &ys).norm_squared()).sqrt();
            worst_gap = worst_gap.max(t.final_gap());
            worst_dist = worst_dist.max(dist);
            if t.reason != StopReason::Converged || t.final_gap() > 1e-6 || dist > 1e-5 {
                failing.push(format!(
                    "case {case} {regime}: gap {:.2e}, distance {dist:.2e}",
                    t.final_gap()
                ));
            }
        }
    }
    outcome(
        failing.is_empty(),
        format!("{runs} runs, worst final gap {worst_gap:.2e} (tol 1e-6), worst distance to saddle {worst_dist:.2e} (tol 1e-5){}", failing_note(&failing)),
    )
}

// ---------------------------------------------------------------- 7

fn slope_of(
    problem: &MinimaxProblem,
    cfg: &RegimeConfig,
    grid: &[f64],
    init: &Init,
    max_iter: usize,
) -> (Option<f64>, Vec<Option<usize>>) {
    let t = agp::bench::rate_experiment(problem, cfg, grid, max_iter, init).unwrap();
    (t.slope, t.rows.iter().map(|r| r.t_eps).collect())
}

type RateCase<'a> = (String, MinimaxProblem, RegimeConfig, Init, &'a [f64], f64);

fn criterion_rates(ledger: &mut Ledger) -> Outcome {
    let strong_grid = [1e-1, 1e-2, 1e-3, 1e-4];
    let weak_grid = [1e-1, 1e-2, 1e-3];
    let mut lines = Vec::new();
    let mut pass = true;
    let cases: Vec<RateCase> = vec![
        {
            let (l, p, c, i) = auto_case(
                "sine(seed=41, nx=3, ny=3, mu=1, coupling=0.1, bound=inf)",
                Regime::NcSc,
            );
            (l, p, c, i, &strong_grid[..], 2.5)
        },
        {
            let (l, p, c, i) = auto_case(
                "quadratic(seed=42, nx=3, ny=3, kind=sc_nc, coupling=0.1, linear=1)",
                Regime::ScNc,
            );
            (l, p, c, i, &strong_grid[..], 2.5)
        },
        (
            "bilinear(n=1) nc_c".into(),
            build("bilinear(n=1)"),
            RegimeConfig::NcC {
                eta_bar: 0.5,
                rho_bar: 1.0,
                tau: 3.0,
            },
            Init::Point {
                x: vec![1.0],
                y: vec![1.0],
            },
            &weak_grid[..],
            4.5,
        ),
        (
            "bilinear(n=1) c_nc".into(),
            build("bilinear(n=1)"),
            RegimeConfig::CNc {
                zeta_bar: 1.0,
                nu_bar: 0.5,
                tau: 3.0,
            },
            Init::Point {
                x: vec![1.0],
                y: vec![1.0],
            },
            &weak_grid[..],
            4.5,
        ),
    ];
    for (label, p, cfg, init, grid, limit) in cases {
        let (slope, ts) = slope_of(&p, &cfg, grid, &init, 5_000_000);
        let ok = slope.is_some_and(|s| s <= limit);
        pass &= ok;
        lines.push(format!(
            "{label}: T={:?} slope {} (limit {limit})",
            ts.iter()
                .map(|t| t.map_or(-1, |v| v as i64))
                .collect::<Vec<_>>(),
            slope.map_or("-".to_string(), |s| format!("{s:.2}"))
        ));
        if let Some(Some(t)) = ts.last() {
            ledger.bound_cases.push(BoundCase {
                label,
                problem: p,
                cfg,
                init,
                eps: *grid.last().unwrap(),
                t_eps: *t,
            });
        }
    }
    outcome(pass, lines.join("; "))
}

// ---------------------------------------------------------------- 8

fn criterion_bounds(ledger: &Ledger) -> Outcome {
    let mut min_ratio = f64::INFINITY;
    let mut checked = 0;
    let mut skipped = Vec::new();
    let mut failing = Vec::new();
    for c in &ledger.bound_cases {
        let bound = TheoryConstants::assemble(&c.problem, &c.cfg, &c.init)
            .and_then(|k| compute_bound(&k, c.eps));
        match bound {
            Ok(b) => {
                checked += 1;
                let ratio = b / c.t_eps as f64;
                min_ratio = min_ratio.min(ratio);
                if ratio < 1.0 {
                    failing.push(format!("{}: bound {b:.3e} < T {}", c.label, c.t_eps));
                }
            }
            Err(e) => skipped.push(format!("{} ({e})", c.label)),
        }
    }
    let pass = failing.is_empty() && checked > 0;
    outcome(
        pass,
        format!(
            "{checked} converged runs with exact constants, smallest bound/T ratio {min_ratio:.3e}{}{}",
            if skipped.is_empty() { String::new() } else { format!("; {} without a finite bound", skipped.len()) },
            failing_note(&failing)
        ),
    )
}

// ---------------------------------------------------------------- 9

fn criterion_gda_contrast() -> Outcome {
    let free = build("bilinear(n=1, bound=inf)");
    let opts = RunOptions::new(f64::MIN_POSITIVE, 200)
        .init(Init::Point {
            x: vec![1.0],
            y: vec![0.0],
        })
        .retain_iterates(true);
    let g = run_gda(&free, 0.1, 0.1, &opts).unwrap();
    let (x, y) = g.iterates.as_ref().unwrap().last().unwrap();
    let norm = (x.norm_squared() + y.norm_squared()).sqrt();
    let diverges = norm > 1.0;

    let boxed = build("bilinear(n=1)");
    let cfg = RegimeConfig::NcC {
        eta_bar: 0.5,
        rho_bar: 1.0,
        tau: 3.0,
    };
    let init = Init::Point {
        x: vec![1.0],
        y: vec![1.0],
    };
    let a = run_with(
        &boxed,
        &cfg,
        &RunOptions::new(1e-3, 10_000_000).init(init.clone()),
    )
    .unwrap();
    let bound = TheoryConstants::assemble(&boxed, &cfg, &init)
        .and_then(|c| compute_bound(&c, 1e-3))
        .unwrap();
    let converges = a.t_eps.is_some_and(|t| (t as f64) <= bound);
    outcome(
        diverges && converges,
        format!(
            "gda |(x, y)| after 200 steps {norm:.4} from 1; agp nc_c on the box reaches 1e-3 at T={} with bound {bound:.3e}",
            a.t_eps.map_or("-".to_string(), |t| t.to_string())
        ),
    )
}

// ---------------------------------------------------------------- 10

const SUITE: &str = "\
eps = 1e-5
max_iter = 20000
problem = quadratic(seed=3, nx=3, ny=2, kind=nc_sc)
problem = quadratic(seed=4, nx=2, ny=3, kind=sc_nc)
problem = quadratic(seed=5, nx=3, ny=3, kind=nc_c)
problem = sine(seed=6)
problem = bilinear(n=1)
regime = c_nc(zeta_bar=1, nu_bar=0.5)
init = point(x=[1], y=[1])
problem = bilinear(n=1)
solver = gda
step_x = 0.1
step_y = 0.1
";

fn criterion_determinism() -> Outcome {
    let specs = parse_config(SUITE).unwrap();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut all = Vec::new();
    for (dir, par) in dirs.iter().zip([1usize, 4, 4]) {
        all.push(run_suite(&specs, par, dir.path()).unwrap());
    }
    let mut identical = true;
    let mut files = 0;
    for s in &specs {
        let name = format!("{}.csv", s.id);
        let first = fs::read(dirs[0].path().join(&name)).unwrap();
        files += 1;
        for d in &dirs[1..] {
            identical &= fs::read(d.path().join(&name)).unwrap() == first;
        }
    }
    let order = all
        .iter()
        .all(|runs| runs.iter().map(|r| &r.id).eq(specs.iter().map(|s| &s.id)));

    let mut lossless = true;
    let mut values = 0;
    for s in &specs {
        let bytes = fs::read(dirs[0].path().join(format!("{}.csv", s.id))).unwrap();
        let records = read_trace_csv(bytes.as_slice()).unwrap();
        let mut again = Vec::new();
        write_trace_csv(&mut again, &records).unwrap();
        lossless &= again == bytes;
        values += records.len() * 14;
    }
    outcome(
        identical && order && lossless,
        format!(
            "{files} traces byte-identical across 3 runs at parallelism 1/4/4: {identical}; summary order kept: {order}; {values} values re-serialize identically: {lossless}"
        ),
    )
}

// ----------------------------------------------------------------

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    let within = took <= limit;
    o.pass &= within;
    o.detail = format!(
        "{} [{:.2}s, limit {}s]",
        o.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    o
}

fn main() {
    let secs = Duration::from_secs;
    let mut ledger = Ledger::default();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "projection suite", timed(secs(5), criterion_projection)),
        (
            2,
            "gradient consistency",
            timed(secs(5), criterion_gradients),
        ),
        (
            3,
            "monitors nc_sc",
            timed(secs(60), || criterion_nc_sc(&mut ledger)),
        ),
        (
            4,
            "monitors sc_nc",
            timed(secs(60), || criterion_sc_nc(&mut ledger)),
        ),
        (
            5,
            "monitors nc_c and c_nc",
            timed(secs(120), || criterion_concave(&mut ledger)),
        ),
        (
            6,
            "saddle accuracy",
            timed(secs(10), || criterion_saddle(&mut ledger)),
        ),
        (
            7,
            "rate slopes",
            timed(secs(600), || criterion_rates(&mut ledger)),
        ),
        (
            8,
            "theoretical bounds",
            timed(secs(60), || criterion_bounds(&ledger)),
        ),
        (9, "gda contrast", timed(secs(5), criterion_gda_contrast)),
        (
            10,
            "determinism and csv",
            timed(secs(60), criterion_determinism),
        ),
    ];

    let mut failed = 0;
    for (n, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {n}: {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
