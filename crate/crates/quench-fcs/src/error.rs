//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied parameter violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The adaptive stepper could not make progress (step underflow).
    #[error("integrator failed at t = {t:.6e} for mode k = {k:.6} (A = {a:.6}): {reason}")]
    Integrator { k: f64, a: f64, t: f64, reason: String },

    /// An internal numerical guard tripped (probability bounds, positivity,
    /// excessive norm drift).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Argument outside the region where a series evaluation is supported.
    #[error("out of domain: {0}")]
    OutOfDomain(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
