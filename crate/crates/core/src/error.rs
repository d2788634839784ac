use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("support length {len} exceeds the configured cap of {cap}")]
    Resource { len: usize, cap: usize },

    #[error("invalid weight {weight} at atom {atom}")]
    InvalidMeasure { atom: i64, weight: f64 },

    #[error("chain is periodic with period {period}")]
    Periodic { period: u64 },

    #[error("inadmissible jump lists at step {step}: {reason}")]
    Inadmissible { step: usize, reason: String },

    #[error("jump at index {index} does not match the side of its starting point {from}")]
    SideMismatch { index: usize, from: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
