use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Zero (or numerically vanishing) pivot met during a banded solve.
    #[error("singular matrix: zero pivot at row {row}")]
    Singular { row: usize },

    /// NaN or infinity produced during a time march.
    #[error("numerical failure in {module} at step {step}: {detail}")]
    Numerical {
        module: &'static str,
        step: usize,
        detail: String,
    },

    /// Failure of one anchor solve in a real-alpha interpolation.
    #[error("anchor solve at alpha = {alpha} failed: {source}")]
    Anchor {
        alpha: i32,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
