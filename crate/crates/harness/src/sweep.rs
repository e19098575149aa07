//! Grid sweeps of the direct scheme over `(η, N, μ, κ)`.

use std::path::Path;
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use scissors_core::measures::{gaussian_rci, geof_two_mode};
use scissors_core::nla::{herald_nla, ScissorsConfig};

use crate::config::SweepConfig;
use crate::error::{HarnessError, Result};
use crate::record::{read_csv, CsvSink, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub eta: f64,
    pub n: usize,
    pub mu: f64,
    pub kappa: f64,
    pub mu_aux: f64,
}

impl SweepPoint {
    fn matches(&self, r: &SweepRecord) -> bool {
        let kappa = ScissorsConfig::new(self.n, self.kappa, self.mu_aux, self.eta, self.mu)
            .map(|c| c.kappa())
            .unwrap_or(self.kappa);
        self.eta == r.eta && self.n == r.n && self.mu == r.mu && kappa == r.kappa && self.mu_aux == r.mu_aux
    }
}

/// Points in output order: η outermost, then N, μ, κ.
pub fn plan(cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    let mus = cfg.mu.values()?;
    let kappas = cfg.kappa.values()?;
    let mut points = Vec::with_capacity(cfg.eta.len() * cfg.n.len() * mus.len() * kappas.len());
    for &eta in &cfg.eta {
        for &n in &cfg.n {
            for &mu in &mus {
                for &kappa in &kappas {
                    points.push(SweepPoint {
                        eta,
                        n,
                        mu,
                        kappa,
                        mu_aux: cfg.mu_aux,
                    });
                }
            }
        }
    }
    Ok(points)
}

/// Heralds the direct scheme at one point and evaluates the measures.
pub fn evaluate(p: &SweepPoint, geof: bool, timing: bool) -> scissors_core::Result<SweepRecord> {
    let start = Instant::now();
    let cfg = ScissorsConfig::new(p.n, p.kappa, p.mu_aux, p.eta, p.mu)?;
    let h = herald_nla(&cfg)?;
    let state = h.result.state()?;
    let rci_g = gaussian_rci(&state)?;
    let geof = if geof { Some(geof_two_mode(&state)?) } else { None };
    Ok(SweepRecord {
        eta: p.eta,
        n: p.n,
        mu: p.mu,
        kappa: cfg.kappa(),
        mu_aux: p.mu_aux,
        rci_g,
        p_succ: h.p_succ,
        p_succ_prime: h.p_succ_prime,
        p_succ_valid: h.p_succ <= 1.0,
        geof,
        product: rci_g * h.p_succ,
        timing: if timing { start.elapsed().as_secs_f64() } else { 0.0 },
    })
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    /// Points that failed, with the reason.
    pub skipped: Vec<(SweepPoint, String)>,
}

impl SweepOutcome {
    pub fn best_by<F: Fn(&SweepRecord) -> f64>(&self, key: F) -> Option<&SweepRecord> {
        self.records
            .iter()
            .max_by(|a, b| key(a).total_cmp(&key(b)))
    }
}

/// Evaluates `points` in parallel chunks; `emit` sees records in plan order.
pub fn run_points<F>(points: &[SweepPoint], chunk: usize, geof: bool, timing: bool, mut emit: F) -> Result<SweepOutcome>
where
    F: FnMut(&SweepRecord) -> Result<()>,
{
    let mut out = SweepOutcome::default();
    for block in points.chunks(chunk.max(1)) {
        let results: Vec<_> = block.par_iter().map(|p| evaluate(p, geof, timing)).collect();
        for (p, r) in block.iter().zip(results) {
            match r {
                Ok(rec) => {
                    emit(&rec)?;
                    out.records.push(rec);
                }
                Err(e) => {
                    warn!("skipping eta={} N={} mu={} kappa={}: {e}", p.eta, p.n, p.mu, p.kappa);
                    out.skipped.push((*p, e.to_string()));
                }
            }
        }
    }
    Ok(out)
}

/// Runs the sweep in memory.
pub fn run(cfg: &SweepConfig, timing: bool) -> Result<SweepOutcome> {
    let points = plan(cfg)?;
    let out = run_points(&points, cfg.chunk, cfg.geof, timing, |_| Ok(()))?;
    check_validity(cfg, out.skipped.len(), points.len())?;
    Ok(out)
}

pub fn check_validity(cfg: &SweepConfig, failed: usize, total: usize) -> Result<()> {
    if total > 0 && failed as f64 > cfg.max_invalid_fraction * total as f64 {
        return Err(HarnessError::Validity {
            failed,
            total,
            allowed: cfg.max_invalid_fraction,
        });
    }
    Ok(())
}

/// Drops a trailing partial line left by an interrupted write.
fn trim_partial_line(path: &Path) -> Result<()> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        return Ok(());
    }
    let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    std::fs::write(path, &bytes[..keep]).map_err(|e| HarnessError::io(path, e))
}

/// Streams the sweep to `path`. With `resume`, records already in the file
/// are kept and evaluation continues after the last of them.
pub fn run_to_file(cfg: &SweepConfig, path: &Path, resume: bool, timing: bool) -> Result<SweepOutcome> {
    let points = plan(cfg)?;
    let mut start = 0;
    let mut previous = Vec::new();
    let mut sink = if resume && path.exists() {
        trim_partial_line(path)?;
        previous = if std::fs::metadata(path).map_err(|e| HarnessError::io(path, e))?.len() == 0 {
            CsvSink::create::<SweepRecord>(path)?.flush()?;
            Vec::new()
        } else {
            read_csv::<SweepRecord>(path)?
        };
        // Existing records must be a subsequence of the plan.
        for (k, r) in previous.iter().enumerate() {
            match points[start..].iter().position(|p| p.matches(r)) {
                Some(i) => start += i + 1,
                None => {
                    return Err(HarnessError::Resume(format!(
                        "record {} of {} is not part of this configuration",
                        k + 1,
                        path.display()
                    )))
                }
            }
        }
        info!("resuming after {} records ({} of {} points done)", previous.len(), start, points.len());
        CsvSink::append(path)?
    } else {
        CsvSink::create::<SweepRecord>(path)?
    };
    let mut out = run_points(&points[start..], cfg.chunk, cfg.geof, timing, |r| sink.write(r))?;
    sink.flush()?;
    previous.append(&mut out.records);
    out.records = previous;
    check_validity(cfg, out.skipped.len(), points.len() - start)?;
    Ok(out)
}
