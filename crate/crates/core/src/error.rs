use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain spec: {0}")]
    InvalidSpec(String),

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("invalid solver init: {0}")]
    InvalidInit(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("degenerate level construction: {0}")]
    DegenerateLevel(String),

    #[error("field/domain mismatch: expected {expected} values, got {got}")]
    FieldLength { expected: usize, got: usize },

    #[error("field contains a non-finite value at node {0}")]
    NonFinite(usize),

    #[error("sweep failed: {0}")]
    SweepFailed(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
