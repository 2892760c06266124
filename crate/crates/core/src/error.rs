use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LevyError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature failure: partial value {partial} with error estimate {error}")]
    QuadratureFailure { partial: f64, error: f64 },

    #[error("non-integrable integrand: {0}")]
    NonIntegrable(String),

    #[error("unstable limit: {0}")]
    UnstableLimit(String),

    #[error("existence of the compensated kernel not certified")]
    ExistenceNotCertified,

    #[error("hypothesis not certified: {0}")]
    NotCertified(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LevyError {
    fn from(e: std::io::Error) -> Self {
        LevyError::Io(e.to_string())
    }
}

impl From<csv::Error> for LevyError {
    fn from(e: csv::Error) -> Self {
        LevyError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LevyError>;
