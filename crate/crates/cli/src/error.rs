//! Command-line failures and their exit codes.

use thiserror::Error;

/// Failure of a subcommand.
#[derive(Debug, Error)]
pub enum CliError {
    /// The problem file or a flag does not fit the schema.
    #[error("schema error: {0}")]
    Schema(String),
    /// A computation failed.
    #[error("{0}")]
    Core(lpnf::Error),
    /// Reading or writing files failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<lpnf::Error> for CliError {
    fn from(e: lpnf::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    /// Process exit code: 2 schema, 3 trivial invariant ring, 4 small divisor,
    /// 5 resonant part outside the span of `S`, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Core(lpnf::Error::EmptyRing { .. }) => 3,
            CliError::Core(lpnf::Error::ZeroSmallDivisor { .. }) => 4,
            CliError::Core(lpnf::Error::NotGoodPerturbation { .. }) => 5,
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}
