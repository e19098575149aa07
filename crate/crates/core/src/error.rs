use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid mode selection: {0}")]
    InvalidModes(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("covariance matrix is not physical (smallest symplectic eigenvalue {0})")]
    NotPhysical(f64),

    #[error("matrix is not symplectic (max deviation {0:e})")]
    NotSymplectic(f64),

    #[error("measurement block is numerically singular")]
    SingularMeasurement,

    #[error("heralding probability {0:e} is below the numerical floor")]
    HeraldImpossible(f64),

    #[error("heralded moments are not physical: {0}")]
    MomentPrecisionLoss(String),

    #[error("Fock truncation too coarse: {0}")]
    Truncation(String),

    #[error("quadrature grid does not cover the outcome density (mass {0})")]
    GridCoverage(f64),

    #[error("post-selection window holds no probability mass")]
    EmptyWindow,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
