//! Classification, endomorphism-ring and splitting reports for genus-2
//! curves, with JSON output.

pub mod commands;
pub mod corpus;
pub mod report;
pub mod spec;

use abelsurf::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::NotASquare | Error::Degenerate(_) => CliError::Parse(e.to_string()),
            Error::Capacity(_) | Error::Unsupported(_) => CliError::Capacity(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}
