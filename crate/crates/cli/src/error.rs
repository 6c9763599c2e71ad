use std::path::Path;

use kiq_core::error::Error as CoreError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
/// Config, schema or I/O problem; nothing was computed.
pub const EXIT_INPUT: i32 = 1;
/// Some sweep rows failed; the others were written.
pub const EXIT_PARTIAL: i32 = 2;
/// A fit could not produce a result.
pub const EXIT_FIT: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: CoreError,
    },

    #[error(transparent)]
    Bare(#[from] CoreError),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn in_file(path: &Path, source: CoreError) -> Self {
        CliError::Core {
            context: path.display().to_string(),
            source,
        }
    }

    fn core(&self) -> Option<&CoreError> {
        match self {
            CliError::Core { source, .. } | CliError::Bare(source) => Some(source),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.core() {
            Some(
                CoreError::NotConverged { .. }
                | CoreError::NoDip
                | CoreError::NoDecay
                | CoreError::Singular
                | CoreError::NoInteriorMaximum { .. }
                | CoreError::InsufficientTail { .. },
            ) => EXIT_FIT,
            _ => EXIT_INPUT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
