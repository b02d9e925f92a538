use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("resource budget exceeded: dimension {dim} exceeds limit {limit}")]
    Budget { dim: usize, limit: usize },
}

pub type CoreResult<T> = Result<T, CoreError>;
