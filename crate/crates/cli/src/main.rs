//! `agp` command-line harness.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agp::bench::{
    compare_suite, exit_code, format_table, parse_config_with, rate_experiment, run_suite,
    write_summary, Overrides, RateTable, RunSpec, RunSummary, SuiteEcho, SuiteSummary,
};
use agp::verify::finite_diff_check;
use agp::Error;
use clap::{Args, Parser, Subcommand};

const EXIT_CONFIG: u8 = 4;
const FD_POINTS: usize = 100;

#[derive(Parser)]
#[command(
    name = "agp",
    version,
    about = "Alternating gradient projection for smooth minimax problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every spec in the config and write traces plus summary.json
    Solve(Common),
    /// Fit log T(eps) against log(1/eps) for every AGP spec
    Rate(Common),
    /// Finite-difference gradient checks and monitored runs
    Check(Common),
    /// Run each spec with AGP and with GDA side by side
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Suite config file
    config: PathBuf,
    /// Output directory
    #[arg(long, env = "AGP_OUT_DIR", default_value = "agp-out")]
    out_dir: PathBuf,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    /// Replaces the seed of every seeded problem
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<(Vec<RunSpec>, SuiteEcho), Error> {
        let text = fs::read_to_string(&self.config)?;
        if let Some(e) = self.eps {
            if !e.is_finite() || e <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "--eps must be positive, got {e}"
                )));
            }
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidArgument(
                "--max-iter must be at least 1".into(),
            ));
        }
        let ov = Overrides {
            eps: self.eps,
            max_iter: self.max_iter,
            seed: self.seed,
        };
        let specs = parse_config_with(&text, &ov)?;
        let echo = SuiteEcho {
            path: Some(self.config.display().to_string()),
            text,
            eps: self.eps,
            max_iter: self.max_iter,
            seed: self.seed,
        };
        Ok((specs, echo))
    }

    fn summary(&self, echo: SuiteEcho, runs: Vec<RunSummary>) -> SuiteSummary {
        SuiteSummary {
            config: echo,
            parallelism: self.parallelism.max(1),
            runs,
        }
    }
}

type Handler = fn(&Common, Vec<RunSpec>, SuiteEcho) -> Result<u8, Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, run): (&Common, Handler) = match &cli.command {
        Command::Solve(c) => (c, solve),
        Command::Rate(c) => (c, rate),
        Command::Check(c) => (c, check),
        Command::Compare(c) => (c, compare),
    };
    let (specs, echo) = match common.load() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}: {e}", common.config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(common, specs, echo) {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::Config { .. }) => {
            eprintln!("error: {}: {e}", common.config.display());
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn finish(common: &Common, echo: SuiteEcho, runs: Vec<RunSummary>) -> Result<u8, Error> {
    print!("{}", format_table(&runs));
    let code = exit_code(&runs) as u8;
    let path = write_summary(&common.out_dir, &common.summary(echo, runs))?;
    println!("summary: {}", path.display());
    Ok(code)
}

fn solve(common: &Common, specs: Vec<RunSpec>, echo: SuiteEcho) -> Result<u8, Error> {
    let runs = run_suite(&specs, common.parallelism, &common.out_dir)?;
    finish(common, echo, runs)
}

fn check(common: &Common, specs: Vec<RunSpec>, echo: SuiteEcho) -> Result<u8, Error> {
    let mut fd_fail = false;
    println!(
        "{:<34} {:>14} {:>14}  gradient",
        "run", "rel err x", "rel err y"
    );
    for (i, s) in specs.iter().enumerate() {
        let r = finite_diff_check(&s.problem, FD_POINTS, i as u64)?;
        fd_fail |= !r.pass;
        let verdict = if r.pass { "pass" } else { "FAIL" };
        println!(
            "{:<34} {:>14.3e} {:>14.3e}  {verdict}",
            s.id, r.max_rel_error_x, r.max_rel_error_y
        );
    }
    let monitored: Vec<RunSpec> = specs
        .into_iter()
        .filter(|s| s.solver == agp::solver::SolverKind::Agp)
        .map(|mut s| {
            s.monitor = true;
            s
        })
        .collect();
    let runs = run_suite(&monitored, common.parallelism, &common.out_dir)?;
    let monitor_fail = runs.iter().any(|r| r.monitor_pass == Some(false));
    finish(common, echo, runs)?;
    Ok(if fd_fail || monitor_fail { 3 } else { 0 })
}

fn compare(common: &Common, specs: Vec<RunSpec>, echo: SuiteEcho) -> Result<u8, Error> {
    let pairs = compare_suite(&specs, common.parallelism, &common.out_dir)?;
    println!(
        "{:<30} {:>12} {:>12} {:>12} {:>12}",
        "run", "agp T(eps)", "agp gap", "gda T(eps)", "gda gap"
    );
    let show_t = |r: &RunSummary| r.t_eps.map_or("-".to_string(), |t| t.to_string());
    let show_gap = |r: &RunSummary| match (&r.error, r.final_gap) {
        (Some(_), _) => "error".to_string(),
        (None, Some(g)) => format!("{g:.3e}"),
        (None, None) => "-".to_string(),
    };
    for (s, (a, g)) in specs.iter().zip(&pairs) {
        println!(
            "{:<30} {:>12} {:>12} {:>12} {:>12}",
            s.id,
            show_t(a),
            show_gap(a),
            show_t(g),
            show_gap(g)
        );
    }
    let agp_runs: Vec<RunSummary> = pairs.iter().map(|(a, _)| a.clone()).collect();
    let code = exit_code(&agp_runs) as u8;
    let runs = pairs.into_iter().flat_map(|(a, g)| [a, g]).collect();
    let path = write_summary(&common.out_dir, &common.summary(echo, runs))?;
    println!("summary: {}", path.display());
    Ok(code)
}

fn rate(common: &Common, specs: Vec<RunSpec>, echo: SuiteEcho) -> Result<u8, Error> {
    fs::create_dir_all(&common.out_dir)?;
    let mut tables: Vec<RateTable> = Vec::new();
    let mut partial = false;
    for s in &specs {
        let Some(cfg) = &s.config else {
            eprintln!("skipping {}: no schedule", s.id);
            continue;
        };
        let t = rate_experiment(&s.problem, cfg, &s.eps_grid, s.max_iter, &s.init)?;
        partial |= t.partial;
        println!("{} ({})", s.id, t.config);
        for row in &t.rows {
            println!(
                "  eps {:>9.1e}  T {}",
                row.eps,
                row.t_eps.map_or("-".to_string(), |v| v.to_string())
            );
        }
        match t.slope {
            Some(v) => println!(
                "  slope {v:.3}{}",
                if t.partial { " (partial)" } else { "" }
            ),
            None => println!("  slope -"),
        }
        tables.push(t);
    }
    write_rate(&common.out_dir, &echo, &tables)?;
    Ok(if partial { 2 } else { 0 })
}

fn write_rate(out_dir: &Path, echo: &SuiteEcho, tables: &[RateTable]) -> Result<(), Error> {
    let path = out_dir.join("rate.json");
    let doc = serde_json::json!({ "config": echo, "experiments": tables });
    serde_json::to_writer_pretty(BufWriter::new(fs::File::create(&path)?), &doc)?;
    println!("rate table: {}", path.display());
    Ok(())
}
