//! EC-box curves over the amplifier gain.

use std::time::Instant;

use log::{info, warn};
use scissors_core::ecbox::{effective_transmission, lossy_tmsv_geof, EcBox, EcBoxConfig, Measure};
use scissors_core::nla::kappa_from_gain;

use crate::config::EcBoxRunConfig;
use crate::error::Result;
use crate::record::{EcBoxRecord, WindowRecord};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EcBoxRun {
    pub rows: Vec<EcBoxRecord>,
    pub windows: Vec<WindowRecord>,
}

fn box_config(cfg: &EcBoxRunConfig, n: usize, g: f64) -> scissors_core::Result<EcBoxConfig<f64>> {
    let mut c = EcBoxConfig::new(cfg.mu, cfg.mu_res, cfg.eta, n, kappa_from_gain(g), cfg.mu_aux)?;
    c.gain_a = cfg.gain_a;
    c.gain_b = cfg.gain_b;
    c.nodes = cfg.nodes;
    c.feed_forward = cfg.feed_forward;
    c.validate()?;
    Ok(c)
}

/// Evaluates one gain: full-average measures plus every window.
pub fn evaluate(cfg: &EcBoxRunConfig, n: usize, g: f64, timing: bool) -> scissors_core::Result<(EcBoxRecord, Vec<WindowRecord>)> {
    let start = Instant::now();
    let c = box_config(cfg, n, g)?;
    let g = c.nla_gain()?;
    let eta_effec = effective_transmission(g, cfg.eta, cfg.mu_res);
    let b = EcBox::new(c)?;
    let full = b.full_average()?;
    // The ideal correction scales like the amplitude transmission g√η.
    let hi = 2.0 * (g * cfg.eta.sqrt()).max(1.0);
    let (lambda, q1) = full.optimize_gain(hi)?;
    let row = EcBoxRecord {
        n,
        g,
        kappa: c.kappa,
        eta_effec,
        mu: cfg.mu,
        mu_res: cfg.mu_res,
        eta: cfg.eta,
        mu_aux: cfg.mu_aux,
        p_succ: b.success_probability(),
        gain_multiplier: lambda,
        q1_geof: q1,
        q2_geof: full.q2(Measure::Geof)?,
        q2_rci: full.q2(Measure::Rci)?,
        benchmark_eof: lossy_tmsv_geof(cfg.mu, cfg.eta)?,
        timing: 0.0,
    };
    let total = full.total_weight();
    let mut windows = Vec::with_capacity(cfg.windows.len());
    for &w in &cfg.windows {
        let rec = match b.windowed(w, cfg.window_nodes[0], cfg.window_nodes[1]) {
            Ok(s) => WindowRecord {
                n,
                g,
                eta_effec,
                window: w,
                acceptance: if w == 0.0 { 0.0 } else { s.total_weight() / total },
                q2_rci: s.q2(Measure::Rci)?,
                q2_geof: s.q2(Measure::Geof)?,
            },
            Err(e) => {
                warn!("window {w} at N={n} g={g}: {e}");
                WindowRecord {
                    n,
                    g,
                    eta_effec,
                    window: w,
                    acceptance: 0.0,
                    q2_rci: f64::NAN,
                    q2_geof: f64::NAN,
                }
            }
        };
        windows.push(rec);
    }
    let row = EcBoxRecord {
        timing: if timing { start.elapsed().as_secs_f64() } else { 0.0 },
        ..row
    };
    Ok((row, windows))
}

pub fn run(cfg: &EcBoxRunConfig, timing: bool) -> Result<EcBoxRun> {
    let gains = cfg.gain.values()?;
    let mut out = EcBoxRun::default();
    for &n in &cfg.n {
        for &g in &gains {
            match evaluate(cfg, n, g, timing) {
                Ok((row, mut w)) => {
                    info!("N={n} g={g:.4}: q1={:.5} q2={:.5}", row.q1_geof, row.q2_geof);
                    out.rows.push(row);
                    out.windows.append(&mut w);
                }
                Err(e) => warn!("skipping N={n} g={g}: {e}"),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Grid;

    #[test]
    fn rows_respect_convexity_and_constant_benchmark() {
        let cfg = EcBoxRunConfig {
            n: vec![1],
            gain: Grid::Values { values: vec![3.0, 8.0] },
            nodes: 11,
            windows: vec![0.2],
            ..EcBoxRunConfig::default()
        };
        let out = run(&cfg, false).unwrap();
        assert_eq!(out.rows.len(), 2);
        assert_eq!(out.windows.len(), 2);
        for r in &out.rows {
            assert!(r.q2_geof >= r.q1_geof);
            assert_eq!(r.benchmark_eof, out.rows[0].benchmark_eof);
        }
        assert!(out.windows.iter().all(|w| w.acceptance > 0.0 && w.acceptance < 1.0));
    }
}
