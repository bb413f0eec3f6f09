use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a square")]
    NotASquare,
    #[error("operands belong to different contexts")]
    ContextMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not found")]
    NotFound,
    #[error("condition failed: {0}")]
    ConditionFailed(String),
    #[error("degenerate parameters: {0}")]
    Degenerate(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
