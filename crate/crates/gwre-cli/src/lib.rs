//! Library surface of the CLI: config parsing, CSV I/O, subcommand runners.
//! The `gwre` binary is a thin clap wrapper over these.

pub mod compare;
pub mod config;
pub mod csvio;
pub mod run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad configuration or inputs (exit code 2).
    #[error("{0}")]
    Config(String),
    /// Numerical failure during a run (exit code 1).
    #[error("{0}")]
    Numerical(String),
    /// Filesystem trouble (exit code 1).
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

impl From<gwre::Error> for CliError {
    fn from(e: gwre::Error) -> Self {
        use gwre::Error::*;
        match e {
            InvalidPgf(_) | InvalidEnvironment(_) | OutOfRange(_) | BudgetExceeded(_) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
