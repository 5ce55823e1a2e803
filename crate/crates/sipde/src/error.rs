//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad grid sizes, unsupported stencil orders,
    /// out-of-range scheme parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Non-finite data or a numerically unusable state.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A shifted system (I - c B) could not be factored.
    #[error("singular system: {reason} (condition estimate {condition_estimate:.3e})")]
    Singular {
        reason: String,
        condition_estimate: f64,
    },

    /// A time step could not be completed.
    #[error("step failure: {0}")]
    StepFailure(String),

    /// Tableau construction failed at a named step of the order-3 procedure.
    #[error("tableau construction failed at step {step}: {reason}")]
    Construction { step: u8, reason: String },

    /// Stability-function evaluation hit a pole of R.
    #[error("stability function pole: {0}")]
    Pole(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
