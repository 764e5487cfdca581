use std::path::PathBuf;

use psi_ham_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("tolerance file {path}: {message}")]
    Tolerances { path: String, message: String },
    #[error("residual sup-norm {sup:e} exceeds the budget {budget:e}")]
    OverBudget { sup: f64, budget: f64 },
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// 2 for invalid input, 3 for a convergence-region violation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                CoreError::ConvergenceRegion(_) => 3,
                CoreError::Domain(_)
                | CoreError::Parameter(_)
                | CoreError::Step { .. }
                | CoreError::InvalidPsi(_)
                | CoreError::Order(_)
                | CoreError::Variant { .. }
                | CoreError::Length(_) => 2,
                _ => 1,
            },
            CliError::Usage(_) | CliError::Json { .. } | CliError::Tolerances { .. } => 2,
            CliError::Io { .. } | CliError::OverBudget { .. } => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
