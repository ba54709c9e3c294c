//! CLI errors and their exit codes: 0 pass, 2 assertion failure,
//! 3 config error, 4 numeric divergence, 1 anything else.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("assertion failed: {0}")]
    Assertion(String),

    #[error("numeric divergence: {0}")]
    Divergence(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 2,
            CliError::Config(_) => 3,
            CliError::Divergence(_) => 4,
            CliError::Io(_) | CliError::Runtime(_) => 1,
        }
    }
}

impl From<gibbs_lab::Error> for CliError {
    fn from(e: gibbs_lab::Error) -> Self {
        match e {
            gibbs_lab::Error::Diverged(_) | gibbs_lab::Error::ZeroAcceptance => {
                CliError::Divergence(e.to_string())
            }
            gibbs_lab::Error::InvalidParameter(_)
            | gibbs_lab::Error::NotNormalized(_)
            | gibbs_lab::Error::BudgetTooSmall { .. }
            | gibbs_lab::Error::StateSpaceTooLarge { .. } => CliError::Config(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
