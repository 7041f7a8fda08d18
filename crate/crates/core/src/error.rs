use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("index {index} out of range (expected {expected})")]
    IndexOutOfRange { index: usize, expected: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator is not monic: {0}")]
    NotMonic(String),

    #[error("operator is not invertible: {0}")]
    NotInvertible(String),

    #[error("generator window too small: {0}")]
    WindowOverflow(String),

    #[error("truncation depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("1-form is not closed")]
    NotClosed,

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),

    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown name `{0}`")]
    UnknownName(String),
}

pub type Result<T> = std::result::Result<T, Error>;
