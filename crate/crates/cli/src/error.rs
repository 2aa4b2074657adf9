use std::path::{Path, PathBuf};

use thiserror::Error;

/// Exit status for a bad description, bad flags or an unattainable request.
pub const EXIT_USER: i32 = 2;
/// Exit status for unreadable inputs or unwritable outputs.
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    User(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    IoMessage(String),
}

impl CliError {
    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::User(_) => EXIT_USER,
            CliError::Io { .. } | CliError::IoMessage(_) => EXIT_IO,
        }
    }
}

/// Maps a CSV failure on `path` to an IO or a content error.
pub fn csv_error(path: &Path, e: parcs_core::io::CsvError) -> CliError {
    if e.is_io() {
        CliError::IoMessage(format!("{}: {e}", path.display()))
    } else {
        CliError::User(format!("{}: {e}", path.display()))
    }
}
