//! CLI error classes, one per exit code.

use rotequiv::Error as LibError;

pub type CliResult<T> = Result<T, CliError>;

/// Failures bucketed by exit code: parse 2, validation 3, solver 4, I/O 5.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Io(_) => 5,
        }
    }

    pub fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<LibError> for CliError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::InvalidArgument(_) | LibError::BasisMismatch(_) => {
                CliError::Validation(e.to_string())
            }
            LibError::NoBoundState(_)
            | LibError::NoQuantizedSolution { .. }
            | LibError::NonNormalizable { .. }
            | LibError::SolverFailure(_) => CliError::Solver(e.to_string()),
        }
    }
}
