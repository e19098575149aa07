//! Gaussian-state simulation of quantum-scissors noiseless linear amplifiers.

pub mod ecbox;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod herald;
pub mod linalg;
pub mod measures;
pub mod nla;
pub mod optim;
pub mod quadrature;
pub mod scalar;

pub use ecbox::{
    dual_homodyne, effective_transmission, lossy_tmsv_geof, ConditionalHerald, EcBox, EcBoxConfig, Measure,
    OutcomeSamples,
};
pub use error::{Error, Result};
pub use fock::{fig3_oracle, FockCutoffs, OracleResult};
pub use gaussian::{
    beamsplitter, coherent, phase_rotation, squeezer, thermal, tmsv, vacuum, GaussianMeasurement,
    GaussianState, MeasurementKind, SymplecticOp,
};
pub use herald::{herald, herald_probability, HeraldResult, OnOffPattern, SignedGaussianMixture};
pub use measures::{direct_capacity, gaussian_rci, geof_two_mode, thermal_entropy_g};
pub use nla::{gain_from_kappa, herald_nla, kappa_from_gain, NlaHerald, NlaOptions, ScissorsConfig};
pub use quadrature::Rule2D;
pub use scalar::{Real, Tolerances, TOL};

pub type GaussianStateF64 = GaussianState<f64>;
pub type GaussianStateF32 = GaussianState<f32>;
pub type HeraldResultF64 = HeraldResult<f64>;
pub type ScissorsConfigF64 = ScissorsConfig<f64>;
pub type ScissorsConfigF32 = ScissorsConfig<f32>;
pub type NlaHeraldF64 = NlaHerald<f64>;
pub type EcBoxConfigF64 = EcBoxConfig<f64>;
pub type EcBoxF64 = EcBox<f64>;
pub type OutcomeSamplesF64 = OutcomeSamples<f64>;
