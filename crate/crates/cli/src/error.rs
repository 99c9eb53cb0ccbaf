use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Bad input data or configuration.
    #[error("{0}")]
    Data(String),
    /// The run finished but some records failed in external tools.
    #[error("{0}")]
    Partial(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io { .. } | CliError::Partial(_) => ExitCode::from(1),
            CliError::Data(_) => ExitCode::from(2),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
