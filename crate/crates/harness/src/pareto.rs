//! Scatter sampling of `(μ, κ)` and the success-probability / RCI envelope.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ParetoConfig;
use crate::error::Result;
use crate::record::{ParetoPoint, SweepRecord};
use crate::sweep::{run_points, SweepPoint};

/// Log-uniform `(μ, κ)` draws for `n` scissors. The stream depends only on
/// the seed and `n`.
pub fn sample_points(cfg: &ParetoConfig, n: usize) -> Vec<SweepPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let log_uniform = |rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]| (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp();
    (0..cfg.budget)
        .map(|_| {
            let mu = log_uniform(&mut rng, cfg.mu_bounds);
            let kappa = log_uniform(&mut rng, cfg.kappa_bounds);
            SweepPoint {
                eta: cfg.eta,
                n,
                mu,
                kappa,
                mu_aux: cfg.mu_aux,
            }
        })
        .collect()
}

/// Upper-left staircase: walking from high to low success probability, keep
/// each point that beats every RCI seen so far.
pub fn envelope(records: &[SweepRecord]) -> Vec<ParetoPoint> {
    let mut sorted: Vec<&SweepRecord> = records.iter().filter(|r| r.rci_g.is_finite()).collect();
    sorted.sort_by(|a, b| b.p_succ.total_cmp(&a.p_succ).then(b.rci_g.total_cmp(&a.rci_g)));
    let mut out: Vec<ParetoPoint> = Vec::new();
    for r in sorted {
        if out.last().is_none_or(|last| r.rci_g > last.best_rci) {
            out.push(ParetoPoint {
                n: r.n,
                p_succ: r.p_succ,
                best_rci: r.rci_g,
                arg_mu: r.mu,
                arg_kappa: r.kappa,
            });
        }
    }
    out
}

/// Best RCI reachable with success probability at least `p`.
pub fn best_at(env: &[ParetoPoint], p: f64) -> Option<f64> {
    env.iter().filter(|q| q.p_succ >= p).map(|q| q.best_rci).reduce(f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoRun {
    pub n: usize,
    pub samples: Vec<SweepRecord>,
    pub envelope: Vec<ParetoPoint>,
}

pub fn run(cfg: &ParetoConfig) -> Result<Vec<ParetoRun>> {
    cfg.n
        .iter()
        .map(|&n| {
            let points = sample_points(cfg, n);
            let out = run_points(&points, 512, false, false, |_| Ok(()))?;
            let envelope = envelope(&out.records);
            Ok(ParetoRun {
                n,
                samples: out.records,
                envelope,
            })
        })
        .collect()
}

/// Where envelope `a` lies above envelope `b`, on the union of their
/// success-probability breakpoints: `(p, best_a, best_b)`.
pub fn compare(a: &[ParetoPoint], b: &[ParetoPoint]) -> Vec<(f64, f64, f64)> {
    let mut ps: Vec<f64> = a.iter().chain(b).map(|q| q.p_succ).collect();
    ps.sort_by(|x, y| x.total_cmp(y));
    ps.dedup();
    ps.par_iter()
        .filter_map(|&p| Some((p, best_at(a, p)?, best_at(b, p)?)))
        .collect()
}
