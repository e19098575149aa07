//! Gaussian pipeline against the truncated Fock simulation of the
//! single-scissors circuit.

use rayon::prelude::*;
use scissors_core::fock::{fig3_oracle, FockCutoffs};
use scissors_core::nla::{herald_nla, ScissorsConfig};

use crate::config::OracleConfig;
use crate::error::Result;
use crate::record::OracleRecord;

/// Entries this small are compared on an absolute scale.
const ABS_FLOOR: f64 = 1e-12;

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(ABS_FLOOR)
}

pub fn check_point(mu: f64, kappa: f64, eta: f64, mu_aux: f64, cutoff: usize, tol: f64) -> scissors_core::Result<OracleRecord> {
    let cfg = ScissorsConfig::new(1, kappa, mu_aux, eta, mu)?;
    let g = herald_nla(&cfg)?;
    let f = fig3_oracle(mu, cfg.kappa(), mu_aux, eta, FockCutoffs::uniform(cutoff), true)?;
    let p_rel_err = rel_err(g.p_succ_prime, f.p_succ_prime);
    let mut cov_max_rel_err: f64 = 0.0;
    for i in 0..4 {
        for j in i..4 {
            cov_max_rel_err = cov_max_rel_err.max(rel_err(g.result.cov[(i, j)], f.cov[(i, j)]));
        }
    }
    Ok(OracleRecord {
        mu,
        kappa: cfg.kappa(),
        eta,
        mu_aux,
        cutoff,
        p_gauss: g.p_succ_prime,
        p_fock: f.p_succ_prime,
        p_rel_err,
        cov_max_rel_err,
        input_tail: f.input_tail,
        output_tail: f.output_tail,
        pass: p_rel_err <= tol && cov_max_rel_err <= tol,
    })
}

/// Every point of the `η × μ × κ` grid, in that nesting order.
pub fn run(cfg: &OracleConfig) -> Result<Vec<OracleRecord>> {
    let mut points = Vec::new();
    for &eta in &cfg.eta {
        for &mu in &cfg.mu {
            for &kappa in &cfg.kappa {
                points.push((mu, kappa, eta));
            }
        }
    }
    points
        .par_iter()
        .map(|&(mu, kappa, eta)| Ok(check_point(mu, kappa, eta, cfg.mu_aux, cfg.cutoff, cfg.tolerance)?))
        .collect()
}
