use num_complex::Complex64;
use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, Error)]
pub enum LevyError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid Lévy measure: {0}")]
    InvalidMeasure(String),

    #[error("quadrature did not converge: partial value {partial} with error estimate {error_estimate:.3e} after {evaluations} evaluations")]
    QuadratureFailure {
        partial: Complex64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = LevyError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> LevyError {
    LevyError::Domain(msg.into())
}

impl From<std::io::Error> for LevyError {
    fn from(e: std::io::Error) -> Self {
        LevyError::Io(e.to_string())
    }
}
