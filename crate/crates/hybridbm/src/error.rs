use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Operations needing `nu` reject the pure arithmetic submodel.
    #[error("nu undefined; pure arithmetic case (sigma2 = 0)")]
    NuUndefined,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("series not convergent: {0}")]
    SeriesNotConvergent(String),
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
