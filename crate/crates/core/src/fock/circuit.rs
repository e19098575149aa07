//! Single-scissors amplifier after a pure-loss channel, simulated in Fock space.
//!
//! Mode order matches the Gaussian layout for one scissors:
//! `A, Y, C, D, B`.

use nalgebra::{DMatrix, DVector};

use super::{fock_tmsv_dims, FockDensity, FockVector};
use crate::error::{invalid, Result};
use crate::herald::OnOffPattern;
use crate::scalar::Real;

/// Photon-number cutoffs for the oracle circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockCutoffs {
    /// Levels kept in each arm of the input TMSV.
    pub signal: usize,
    /// Levels kept in each arm of the auxiliary TMSV.
    pub aux: usize,
}

impl FockCutoffs {
    pub fn uniform(cutoff: usize) -> Self {
        Self {
            signal: cutoff,
            aux: cutoff.min(6),
        }
    }

    /// Mode dimensions large enough that no beamsplitter output is clipped.
    pub fn dims(&self) -> Vec<usize> {
        let mixed = self.signal + self.aux - 1;
        vec![self.signal, mixed, mixed, self.aux, self.aux]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<T: Real> {
    /// Sum over both click patterns, `P_succ′`.
    pub p_succ_prime: T,
    pub pattern_probabilities: [T; 2],
    /// Moments of the heralded `(A, B)` state.
    pub mean: DVector<T>,
    pub cov: DMatrix<T>,
    /// Probability discarded by truncating the two input TMSVs.
    pub input_tail: T,
    /// Relative weight on the top level of any mode in the heralded state.
    pub output_tail: T,
}

/// Runs the circuit and heralds on `D` ON with exactly one of `Y`, `C` ON.
/// With `feed_forward`, `B` is rotated by π when `C` clicks.
pub fn fig3_oracle<T: Real>(
    mu: T,
    kappa: T,
    mu_aux: T,
    eta: T,
    cutoffs: FockCutoffs,
    feed_forward: bool,
) -> Result<OracleResult<T>> {
    if !(kappa > T::zero() && kappa < T::one()) {
        return Err(invalid("kappa", "not in (0, 1)"));
    }
    let dims = cutoffs.dims();
    let (sig, sig_tail) = fock_tmsv_dims(mu, cutoffs.signal, dims[0], dims[1])?;
    let (aux, aux_tail) = fock_tmsv_dims(mu_aux, cutoffs.aux, dims[2], dims[3])?;
    let vac_b = FockVector::vacuum(vec![dims[4]])?;
    let state = sig.tensor(&aux).tensor(&vac_b);
    let mut rho = state.loss(eta, 1)?;
    rho.beamsplitter(kappa, (4, 2))?;
    rho.beamsplitter(T::lit(0.5), (1, 2))?;

    let y_click = OnOffPattern::new(vec![2], vec![1, 3], vec![0, 4]);
    let c_click = OnOffPattern::new(vec![1], vec![2, 3], vec![0, 4]);
    let (ry, py) = rho.onoff(&y_click)?;
    let (mut rc, pc) = rho.onoff(&c_click)?;
    if feed_forward {
        rc.phase_rotation(T::pi(), 4)?;
    }
    let mut branches = ry.branches;
    branches.extend(rc.branches);
    let heralded = FockDensity { branches };
    let (mean, cov) = heralded.moments(&[0, 4])?;
    Ok(OracleResult {
        p_succ_prime: py + pc,
        pattern_probabilities: [py, pc],
        mean,
        cov,
        input_tail: sig_tail + aux_tail,
        output_tail: heralded.tail_mass(),
    })
}
