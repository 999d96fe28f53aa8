use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("inconsistent linear system")]
    InconsistentSystem,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not an intertwiner: {0}")]
    NotAnIntertwiner(String),

    #[error("representation {0} is not certified irreducible")]
    NotIrreducible(String),

    #[error("representation failed validation: {0}")]
    Validation(String),

    #[error("insufficient precision: need {needed}, have {available}")]
    InsufficientPrecision { needed: String, available: String },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("depth decomposition obstructed: {0}")]
    Obstruction(String),

    #[error("unknown representation label {0:?}")]
    UnknownLabel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
