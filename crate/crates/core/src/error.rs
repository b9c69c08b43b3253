use thiserror::Error;

/// Errors shared across the simulation and evaluation modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A truncated evaluator could not certify the requested tolerance.
    /// Carries the tightest tail bound it could establish.
    #[error("tolerance {requested:e} unachievable in {context}: achieved tail bound {achieved:e}")]
    ToleranceUnachievable {
        context: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// Simple-graph rejection sampling exhausted its retry budget.
    #[error("no simple graph found in {attempts} attempts")]
    RetryCapExceeded { attempts: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
