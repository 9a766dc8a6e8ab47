use std::io;

use hbvm_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{steps} step(s) did not converge")]
    NonConvergence { steps: usize },
    #[error(transparent)]
    Numerics(CoreError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for non-convergence under
    /// `--strict`, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonConvergence { .. } => 3,
            _ => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidConfig(msg) => CliError::Config(msg),
            CoreError::UnsupportedOrder(k) => {
                CliError::Config(format!("unsupported quadrature order {k}"))
            }
            other => CliError::Numerics(other),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
