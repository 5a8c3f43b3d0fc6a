//! File formats and drivers behind the `squeezelat` command.
//!
//! JSON documents are written with every float as `{:.16e}` (17 significant
//! digits), which round-trips exactly and makes output byte-stable. Tables
//! are plain CSV with a header row.

pub mod csv;
pub mod format;
pub mod run;

use squeezelat_core::Error as CoreError;

/// Failure of a command, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad invocation or unreadable input; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Well-formed input that fails a physical or mathematical check; exit
    /// code 1.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NotSquare { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::IndexOutOfRange { .. }
            | CoreError::InvalidParameter { .. }
            | CoreError::CoefficientCount { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<format::FormatError> for CliError {
    fn from(e: format::FormatError) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
