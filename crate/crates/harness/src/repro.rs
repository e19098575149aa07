//! Figure recipes. Each writes plot-ready CSV files plus a JSON summary and
//! checks the stated inequalities and ratios for that figure.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use scissors_core::measures::direct_capacity;

use crate::config::{Config, OptimizeConfig, SweepConfig};
use crate::ecbox_run::{self, EcBoxRun};
use crate::error::{HarnessError, Result};
use crate::optimize::{optimize, OptimizeResult};
use crate::pareto;
use crate::record::{write_csv, EcBoxRecord, SweepRecord};
use crate::summary::{Check, RunSummary};
use crate::sweep::{self, SweepOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Figure {
    Fig4a,
    Fig4b,
    Fig5,
    Fig6,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
        Figure::Fig11,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
            Figure::Fig11 => "fig11",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown figure `{s}`")))
    }
}

/// Slack applied to the activation claim at η = 0.1: the N = 1 optimum must
/// sit at least this far below the bound and the N = 2 optimum this far above.
pub const ACTIVATION_SLACK: f64 = 1e-4;

struct Ctx<'a> {
    cfg: &'a Config,
    dir: &'a Path,
    summary: RunSummary,
}

impl Ctx<'_> {
    fn sweep(&mut self, name: &str, eta: Vec<f64>, n: Vec<usize>) -> Result<SweepOutcome> {
        let sc = SweepConfig {
            eta,
            n,
            ..self.cfg.sweep.clone()
        };
        let path = self.dir.join(format!("{name}.csv"));
        let out = sweep::run_to_file(&sc, &path, false, self.cfg.output.timing)?;
        self.file(&path);
        self.summary.records += out.records.len();
        self.summary.skipped += out.skipped.len();
        Ok(out)
    }

    fn optimum(&self, eta: f64, n: usize) -> Result<OptimizeResult> {
        optimize(&OptimizeConfig {
            eta,
            n,
            ..self.cfg.optimize.clone()
        })
    }

    fn file(&mut self, path: &Path) {
        self.summary.files.push(path.display().to_string());
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.summary.checks.push(Check::new(name, pass, detail));
    }

    fn best(&mut self, rec: &SweepRecord) -> Result<()> {
        self.summary.max = Some(rec.rci_g);
        self.summary.argmax = Some(serde_json::to_value(rec)?);
        Ok(())
    }

    fn ecbox(&mut self, name: &str) -> Result<EcBoxRun> {
        let run = ecbox_run::run(&self.cfg.ecbox, self.cfg.output.timing)?;
        let path = self.dir.join(format!("{name}.csv"));
        write_csv(&path, &run.rows)?;
        self.file(&path);
        self.summary.records += run.rows.len();
        Ok(run)
    }
}

fn best_rci(out: &SweepOutcome) -> Option<&SweepRecord> {
    out.best_by(|r| r.rci_g)
}

/// Runs one recipe into `dir` and writes `<id>_summary.json` there.
pub fn repro(fig: Figure, cfg: &Config, dir: &Path) -> Result<RunSummary> {
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let start = Instant::now();
    let mut ctx = Ctx {
        cfg,
        dir,
        summary: RunSummary::new(format!("repro {fig}"), cfg.hash()),
    };
    match fig {
        Figure::Fig4a => fig4a(&mut ctx)?,
        Figure::Fig4b => fig4b(&mut ctx)?,
        Figure::Fig5 => fig5(&mut ctx)?,
        Figure::Fig6 => fig6(&mut ctx)?,
        Figure::Fig8 => fig8(&mut ctx)?,
        Figure::Fig9 => fig9(&mut ctx)?,
        Figure::Fig10 => fig10(&mut ctx)?,
        Figure::Fig11 => fig11(&mut ctx)?,
    }
    let mut summary = ctx.summary;
    summary.runtime_s = start.elapsed().as_secs_f64();
    summary.write(&dir.join(format!("{fig}_summary.json")))?;
    Ok(summary)
}

fn fig4a(ctx: &mut Ctx) -> Result<()> {
    let eta = 0.01;
    let c = direct_capacity(eta)?;
    let out = ctx.sweep("fig4a", vec![eta], vec![1])?;
    let best = best_rci(&out).cloned();
    let pass = best.as_ref().is_some_and(|b| b.rci_g > 1.5 * c);
    let detail = match &best {
        Some(b) => format!(
            "max RCI {:.6} at mu={:.4e} kappa={:.4e}; 1.5 C_direct = {:.6}",
            b.rci_g,
            b.mu,
            b.kappa,
            1.5 * c
        ),
        None => "no valid points".into(),
    };
    ctx.check("N=1 RCI exceeds 1.5 C_direct at eta=0.01", pass, detail);
    if let Some(b) = best {
        ctx.best(&b)?;
    }
    Ok(())
}

fn write_optima(ctx: &mut Ctx, name: &str, optima: &[&OptimizeResult]) -> Result<()> {
    let path = ctx.dir.join(format!("{name}.csv"));
    let rows: Vec<SweepRecord> = optima.iter().map(|o| o.best.clone()).collect();
    write_csv(&path, &rows)?;
    ctx.file(&path);
    Ok(())
}

fn fig4b(ctx: &mut Ctx) -> Result<()> {
    let eta = 0.01;
    let c = direct_capacity(eta)?;
    let out = ctx.sweep("fig4b", vec![eta], vec![2])?;
    let o1 = ctx.optimum(eta, 1)?;
    let o2 = ctx.optimum(eta, 2)?;
    write_optima(ctx, "fig4b_optimum", &[&o1, &o2])?;
    let ratio = o2.value / o1.value;
    ctx.check(
        "optimised RCI ratio N=2/N=1 in [3, 5] at eta=0.01",
        (3.0..=5.0).contains(&ratio),
        format!("N=1 {:.6}, N=2 {:.6}, ratio {ratio:.4}", o1.value, o2.value),
    );
    let grid_best = best_rci(&out).map_or(f64::NEG_INFINITY, |b| b.rci_g);
    ctx.check(
        "N=2 RCI exceeds C_direct at eta=0.01",
        grid_best > c,
        format!("grid max {grid_best:.6}, C_direct {c:.6}"),
    );
    ctx.best(&o2.best)
}

fn fig5(ctx: &mut Ctx) -> Result<()> {
    let out = ctx.sweep("fig5", vec![0.01], vec![1, 2])?;
    let best = |n| {
        out.records
            .iter()
            .filter(|r| r.n == n)
            .max_by(|a, b| a.rci_g.total_cmp(&b.rci_g))
            .cloned()
    };
    if let (Some(b1), Some(b2)) = (best(1), best(2)) {
        ctx.check(
            "success probability falls from N=1 to N=2 at the RCI optimum",
            b2.p_succ < b1.p_succ,
            format!("P_succ N=1 {:.4e}, N=2 {:.4e}", b1.p_succ, b2.p_succ),
        );
    }
    let invalid = out.records.iter().filter(|r| !r.p_succ_valid).count();
    ctx.check(
        "renormalised success probability stays below 1",
        invalid == 0,
        format!("{invalid} records flagged"),
    );
    Ok(())
}

fn fig6(ctx: &mut Ctx) -> Result<()> {
    let eta = 0.1;
    let c = direct_capacity(eta)?;
    ctx.sweep("fig6", vec![eta], vec![1, 2])?;
    let o1 = ctx.optimum(eta, 1)?;
    let o2 = ctx.optimum(eta, 2)?;
    write_optima(ctx, "fig6_optimum", &[&o1, &o2])?;
    ctx.check(
        "N=1 optimum stays below C_direct at eta=0.1",
        o1.value <= c - ACTIVATION_SLACK,
        format!("N=1 {:.6}, C_direct {c:.7}", o1.value),
    );
    ctx.check(
        "N=2 optimum exceeds C_direct at eta=0.1",
        o2.value > c + ACTIVATION_SLACK,
        format!("N=2 {:.6}, C_direct {c:.7}", o2.value),
    );
    ctx.best(&o2.best)?;

    let runs = pareto::run(&ctx.cfg.pareto)?;
    let samples: Vec<SweepRecord> = runs.iter().flat_map(|r| r.samples.clone()).collect();
    let env: Vec<_> = runs.iter().flat_map(|r| r.envelope.clone()).collect();
    let path = ctx.dir.join("fig6_scatter.csv");
    write_csv(&path, &samples)?;
    ctx.file(&path);
    let path = ctx.dir.join("fig6_envelope.csv");
    write_csv(&path, &env)?;
    ctx.file(&path);
    let by_n: BTreeMap<usize, &pareto::ParetoRun> = runs.iter().map(|r| (r.n, r)).collect();
    if let (Some(a), Some(b)) = (by_n.get(&1), by_n.get(&2)) {
        let cmp = pareto::compare(&b.envelope, &a.envelope);
        let above: Vec<f64> = cmp.iter().filter(|c| c.1 > c.2).map(|c| c.0).collect();
        let below: Vec<f64> = cmp.iter().filter(|c| c.1 < c.2).map(|c| c.0).collect();
        let top = above.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bottom = below.iter().cloned().fold(f64::INFINITY, f64::min);
        ctx.check(
            "N=2 envelope above N=1 at low P_succ and below at high P_succ",
            cmp.first().is_some_and(|c| c.1 > c.2) && cmp.last().is_some_and(|c| c.1 < c.2),
            format!("N=2 ahead up to P_succ {top:.4e}; N=1 ahead from P_succ {bottom:.4e}"),
        );
    }
    Ok(())
}

fn shared<'a>(rows: &'a [EcBoxRecord], n1: usize, n2: usize) -> Vec<(&'a EcBoxRecord, &'a EcBoxRecord)> {
    rows.iter()
        .filter(|a| a.n == n1)
        .filter_map(|a| rows.iter().find(|b| b.n == n2 && b.g == a.g).map(|b| (a, b)))
        .collect()
}

/// Checks on the EC-box rows: q2 against q1, the EOF benchmark and N=2 against N=1.
pub fn ecbox_checks(rows: &[EcBoxRecord]) -> Vec<Check> {
    let mut out = Vec::new();
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.q2_geof < r.q1_geof)
        .map(|r| format!("N={} g={:.3}: q1 {:.6e} > q2 {:.6e}", r.n, r.g, r.q1_geof, r.q2_geof))
        .collect();
    out.push(Check::new(
        "q2 >= q1 on every row",
        bad.is_empty(),
        if bad.is_empty() { format!("{} rows", rows.len()) } else { bad.join("; ") },
    ));
    let n1: Vec<&EcBoxRecord> = rows.iter().filter(|r| r.n == 1).collect();
    let best = n1.iter().max_by(|a, b| a.q2_geof.total_cmp(&b.q2_geof));
    out.push(Check::new(
        "N=1 q2 GEOF exceeds the direct-transmission EOF for some g",
        n1.iter().any(|r| r.q2_geof > r.benchmark_eof),
        best.map_or("no N=1 rows".into(), |b| {
            format!("best q2 {:.6} at g={:.3}, benchmark {:.6}", b.q2_geof, b.g, b.benchmark_eof)
        }),
    ));
    let pairs = shared(rows, 1, 2);
    let bad: Vec<String> = pairs
        .iter()
        .filter(|(a, b)| b.q2_geof < a.q2_geof)
        .map(|(a, b)| format!("g={:.3}: N=1 {:.6e} > N=2 {:.6e}", a.g, a.q2_geof, b.q2_geof))
        .collect();
    out.push(Check::new(
        "N=2 q2 GEOF >= N=1 q2 GEOF at every shared g",
        !pairs.is_empty() && bad.is_empty(),
        if bad.is_empty() { format!("{} shared gains", pairs.len()) } else { bad.join("; ") },
    ));
    out
}

fn fig8(ctx: &mut Ctx) -> Result<()> {
    let run = ctx.ecbox("fig8")?;
    for c in ecbox_checks(&run.rows) {
        ctx.summary.checks.push(c);
    }
    Ok(())
}

fn fig9(ctx: &mut Ctx) -> Result<()> {
    let run = ctx.ecbox("fig9")?;
    let pairs = shared(&run.rows, 1, 2);
    let bad = pairs.iter().filter(|(a, b)| b.p_succ >= a.p_succ).count();
    ctx.check(
        "EC-box success probability lower for N=2 at every shared g",
        !pairs.is_empty() && bad == 0,
        format!("{bad} of {} shared gains violate", pairs.len()),
    );
    Ok(())
}

fn fig10(ctx: &mut Ctx) -> Result<()> {
    let run = ctx.ecbox("fig10")?;
    let path = ctx.dir.join("fig10_windows.csv");
    write_csv(&path, &run.windows)?;
    ctx.file(&path);
    let negative = run.rows.iter().filter(|r| r.q2_rci < 0.0).count();
    ctx.check(
        "full-average RCI negative for nearly all gains",
        negative as f64 >= 0.9 * run.rows.len() as f64,
        format!("{negative} of {} rows negative", run.rows.len()),
    );
    let smallest = ctx.cfg.ecbox.windows.iter().cloned().fold(f64::INFINITY, f64::min);
    let pocket = run
        .windows
        .iter()
        .filter(|w| w.window == smallest && w.q2_rci > 0.0)
        .map(|w| format!("N={} g={:.3}: {:.4}", w.n, w.g, w.q2_rci))
        .collect::<Vec<_>>();
    ctx.check(
        "post-selected RCI positive somewhere at the smallest window",
        !pocket.is_empty(),
        if pocket.is_empty() { format!("window {smallest}") } else { pocket.join("; ") },
    );
    // Empirical: shrinking the window should not lower the RCI.
    let mut violations = Vec::new();
    let mut worst: f64 = 0.0;
    for r in &run.rows {
        let mut ws: Vec<_> = run
            .windows
            .iter()
            .filter(|w| w.n == r.n && w.g == r.g && w.q2_rci.is_finite())
            .collect();
        ws.sort_by(|a, b| b.window.total_cmp(&a.window));
        for pair in ws.windows(2) {
            if pair[1].q2_rci < pair[0].q2_rci {
                worst = worst.max(pair[0].q2_rci - pair[1].q2_rci);
                violations.push(format!("N={} g={:.3} w={}", r.n, r.g, pair[1].window));
            }
        }
    }
    ctx.check(
        "windowed RCI does not decrease as the window shrinks",
        violations.is_empty(),
        if violations.is_empty() {
            "monotone".into()
        } else {
            format!("largest drop {worst:.3e} at {}", violations.join("; "))
        },
    );
    Ok(())
}

fn fig11(ctx: &mut Ctx) -> Result<()> {
    let out = ctx.sweep("fig11", vec![0.01, 0.1], vec![1, 2])?;
    let violations = count_capacity_violations(&out.records)?;
    ctx.check(
        "RCI x P_succ below C_direct at every point",
        violations == 0,
        format!("{violations} violations over {} points", out.records.len()),
    );
    if let Some(b) = out.best_by(|r| r.product - direct_capacity(r.eta).unwrap_or(0.0)) {
        ctx.summary.max = Some(b.product);
        ctx.summary.argmax = Some(serde_json::to_value(b)?);
    }
    Ok(())
}

pub fn count_capacity_violations(records: &[SweepRecord]) -> Result<usize> {
    let mut n = 0;
    for r in records {
        if !(r.product < direct_capacity(r.eta)?) {
            n += 1;
        }
    }
    Ok(n)
}
