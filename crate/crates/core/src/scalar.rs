//! Scalar abstraction shared by every numerical routine in the crate.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// All of the Gaussian calculus, the Fock oracle and the entanglement
/// measures are written against this trait. Tolerances are stored as `f64`
/// and converted on use, so `f32` builds compile but only meet the coarser
/// of them.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Send + Sync {
    /// Lossless-enough conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Numerical tolerances used across the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Symplectic eigenvalues may undershoot 1 by this much.
    pub physicality: f64,
    /// Relative asymmetry allowed in covariance matrices.
    pub symmetry: f64,
    /// Algebraic identities such as `S Ω Sᵀ = Ω`.
    pub identity: f64,
    /// Heralding probabilities below this are treated as impossible events.
    pub probability_floor: f64,
}

pub const TOL: Tolerances = Tolerances {
    physicality: 1e-9,
    symmetry: 1e-10,
    identity: 1e-10,
    probability_floor: 1e-14,
};
