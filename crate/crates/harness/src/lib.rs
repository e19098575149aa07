//! Sweeps, optimisation and figure recipes on top of `scissors-core`.

pub mod config;
pub mod ecbox_run;
pub mod error;
pub mod optimize;
pub mod oracle;
pub mod pareto;
pub mod record;
pub mod repro;
pub mod summary;
pub mod sweep;

pub use config::Config;
pub use error::{HarnessError, Result};
