use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("run `{run}` diverged: {source}")]
    Divergence { run: String, source: nesterov_ode::Error },
    #[error("{0}")]
    Core(#[from] nesterov_ode::Error),
    #[error("{0} assertion(s) failed")]
    Assertion(usize),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 for failed assertions, 2 for bad input, 3 for divergence.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Assertion(_) => ExitCode::from(1),
            CliError::Config(_) | CliError::Io { .. } | CliError::Core(_) => ExitCode::from(2),
            CliError::Divergence { .. } => ExitCode::from(3),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io { path: PathBuf::new(), source: e.into() }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
