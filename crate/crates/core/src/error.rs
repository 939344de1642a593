use alloc::string::String;

use crate::ring::Ring;

/// Errors raised by the exact-arithmetic core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    RingMismatch(Ring, Ring),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("the zero ideal has no prime factorization")]
    ZeroIdeal,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("sample quality {quality:.6} does not exceed the required {required:.6}")]
    Quality { quality: f64, required: f64 },
    #[error("coverage {achieved:.6} is below the target {target:.6}")]
    Coverage { achieved: f64, target: f64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
