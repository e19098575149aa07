use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use log::{error, info};

use scissors_harness::config::{Config, Objective};
use scissors_harness::error::{HarnessError, Result};
use scissors_harness::record::{write_csv, SweepRecord};
use scissors_harness::repro::{repro, Figure};
use scissors_harness::summary::{Check, RunSummary};
use scissors_harness::{ecbox_run, optimize, oracle, pareto, sweep};

#[derive(Parser)]
#[command(name = "scissors", version, about = "Quantum-scissors amplifier sweeps and figure recipes")]
struct Cli {
    /// TOML configuration; defaults apply to every missing key.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, overriding `output.dir`.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the direct scheme on the configured (eta, N, mu, kappa) grid.
    Sweep {
        /// Keep records already in the output file and continue after them.
        #[arg(long)]
        resume: bool,
    },
    /// Maximise RCI or RCI x P_succ over (mu, kappa).
    Optimize {
        #[arg(long)]
        eta: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_parser = parse_objective)]
        objective: Option<Objective>,
    },
    /// Success-probability / RCI envelope from random (mu, kappa) samples.
    Pareto,
    /// EC-box curves over the amplifier gain.
    Ecbox,
    /// Compare the Gaussian pipeline with the Fock simulation.
    OracleCheck,
    /// Reproduce one figure.
    Repro {
        #[arg(value_parser = parse_figure)]
        figure: Figure,
    },
}

fn parse_objective(s: &str) -> std::result::Result<Objective, String> {
    match s {
        "rci" => Ok(Objective::Rci),
        "product" => Ok(Objective::Product),
        _ => Err(format!("unknown objective `{s}` (rci, product)")),
    }
}

fn parse_figure(s: &str) -> std::result::Result<Figure, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn prepare(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

fn finish(mut summary: RunSummary, start: Instant, path: &Path) -> Result<RunSummary> {
    summary.runtime_s = start.elapsed().as_secs_f64();
    summary.write(path)?;
    Ok(summary)
}

fn run(cli: Cli) -> Result<RunSummary> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(o) = cli.out {
        cfg.output.dir = o;
    }
    let dir = cfg.output.dir.clone();
    prepare(&dir)?;
    let start = Instant::now();
    let hash = cfg.hash();
    match cli.command {
        Command::Sweep { resume } => {
            let path = dir.join("sweep.csv");
            let out = sweep::run_to_file(&cfg.sweep, &path, resume, cfg.output.timing)?;
            let mut s = RunSummary::new("sweep", hash);
            s.records = out.records.len();
            s.skipped = out.skipped.len();
            if let Some(b) = out.best_by(|r| r.rci_g) {
                s.max = Some(b.rci_g);
                s.argmax = Some(serde_json::to_value(b)?);
            }
            s.files.push(path.display().to_string());
            finish(s, start, &dir.join("sweep_summary.json"))
        }
        Command::Optimize { eta, n, objective } => {
            let mut oc = cfg.optimize.clone();
            oc.eta = eta.unwrap_or(oc.eta);
            oc.n = n.unwrap_or(oc.n);
            oc.objective = objective.unwrap_or(oc.objective);
            cfg.optimize = oc.clone();
            cfg.validate()?;
            let r = optimize::optimize(&oc)?;
            let path = dir.join("optimize.csv");
            write_csv::<SweepRecord>(&path, std::slice::from_ref(&r.best))?;
            let mut s = RunSummary::new("optimize", cfg.hash());
            s.records = 1;
            s.max = Some(r.value);
            s.argmax = Some(serde_json::to_value(&r.best)?);
            s.files.push(path.display().to_string());
            s.checks.push(Check::new(
                "restarts agree",
                r.converged,
                format!("seed values {:?}", r.seed_values),
            ));
            finish(s, start, &dir.join("optimize_summary.json"))
        }
        Command::Pareto => {
            let runs = pareto::run(&cfg.pareto)?;
            let env: Vec<_> = runs.iter().flat_map(|r| r.envelope.clone()).collect();
            let samples: Vec<_> = runs.iter().flat_map(|r| r.samples.clone()).collect();
            let mut s = RunSummary::new("pareto", hash);
            for (name, n) in [("pareto_envelope.csv", env.len()), ("pareto_samples.csv", samples.len())] {
                s.files.push(dir.join(name).display().to_string());
                s.records += n;
            }
            write_csv(&dir.join("pareto_envelope.csv"), &env)?;
            write_csv(&dir.join("pareto_samples.csv"), &samples)?;
            finish(s, start, &dir.join("pareto_summary.json"))
        }
        Command::Ecbox => {
            let run = ecbox_run::run(&cfg.ecbox, cfg.output.timing)?;
            write_csv(&dir.join("ecbox.csv"), &run.rows)?;
            write_csv(&dir.join("ecbox_windows.csv"), &run.windows)?;
            let mut s = RunSummary::new("ecbox", hash);
            s.records = run.rows.len();
            s.files = vec![
                dir.join("ecbox.csv").display().to_string(),
                dir.join("ecbox_windows.csv").display().to_string(),
            ];
            s.checks = scissors_harness::repro::ecbox_checks(&run.rows);
            finish(s, start, &dir.join("ecbox_summary.json"))
        }
        Command::OracleCheck => {
            let recs = oracle::run(&cfg.oracle)?;
            let path = dir.join("oracle.csv");
            write_csv(&path, &recs)?;
            let failed = recs.iter().filter(|r| !r.pass).count();
            let mut s = RunSummary::new("oracle-check", hash);
            s.records = recs.len();
            s.max = recs.iter().map(|r| r.cov_max_rel_err.max(r.p_rel_err)).reduce(f64::max);
            s.files.push(path.display().to_string());
            s.checks.push(Check::new(
                "Gaussian and Fock pipelines agree",
                failed == 0,
                format!("{failed} of {} points outside tolerance {}", recs.len(), cfg.oracle.tolerance),
            ));
            let s = finish(s, start, &dir.join("oracle_summary.json"))?;
            if failed > 0 {
                return Err(HarnessError::Validity {
                    failed,
                    total: recs.len(),
                    allowed: 0.0,
                });
            }
            Ok(s)
        }
        Command::Repro { figure } => repro(figure, &cfg, &dir),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(summary) => {
            for c in &summary.checks {
                println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            info!("{} finished in {:.2}s", summary.command, summary.runtime_s);
            if summary.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
