use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("transform length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("block length {0} must be even")]
    OddLength(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("input is empty")]
    Empty,
    #[error("signal is identically zero")]
    ZeroSignal,
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("sample rate mismatch: expected {expected} Hz, found {found} Hz")]
    RateMismatch { expected: f64, found: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid filter: {0}")]
    Filter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
