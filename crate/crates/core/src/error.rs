use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A certified decision could not be made at the current precision.
    /// Escalation loops catch this and retry with more bits.
    #[error("decision undecidable at {bits} bits")]
    Undecided { bits: u32 },

    #[error("precision exhausted: no certified answer within {max_bits} bits")]
    PrecisionExhausted { max_bits: u32 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid cache: {0}")]
    CacheInvalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
