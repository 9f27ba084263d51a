//! Command-line plumbing around `repset-core`: the JSON instance format,
//! seeded generation and the `solve`, `verify` and `bench` commands.

pub mod commands;
pub mod format;
pub mod gen;

use repset_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 ok, 1 verification failed, 2 invalid input or usage, 3 cap
    /// overflow, 4 verifier guard exceeded.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) | CliError::Input(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Core(e) => match e {
                Error::BranchBudgetExceeded { .. } | Error::EnumerationCapExceeded { .. } | Error::Overflow(_) => 3,
                Error::GuardExceeded { .. } => 4,
                Error::Postcondition(_) => 1,
                _ => 2,
            },
        }
    }
}
