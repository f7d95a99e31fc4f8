//! CLI failure modes mapped onto the process exit-code contract:
//! 0 success, 1 runtime/data error, 2 usage/config error.

use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad invocation or unusable configuration (exit 2).
    #[error("{0}")]
    Usage(String),
    /// A pipeline failure surfaced from the library (exit 1).
    #[error(transparent)]
    Run(#[from] hiertext_core::Error),
    /// File-system trouble around an output artifact (exit 1).
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Run(_) | CliError::Io { .. } => ExitCode::from(1),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Wraps an io error with the path it concerns.
pub fn io_at(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
