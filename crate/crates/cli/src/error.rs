use std::path::Path;
use std::process::ExitCode;

use boardforge::{FormatError, GenomeError, MetricsError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: malformed files, invalid chromosomes, out-of-range options.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Validation(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(3),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError::Runtime(format!("{}: {e}", path.display()))
    }
}

impl From<GenomeError> for CliError {
    fn from(e: GenomeError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Genome(g) => g.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Validation(message()))
    }
}
