use std::path::PathBuf;

use invvol_core::error::ErrorKind;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] invvol_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for numerical failure, 4 for
    /// sign errors in market data.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Numerical => 3,
                ErrorKind::Sign => 4,
            },
            Error::Io { .. } | Error::Parse { .. } | Error::Config(_) => 2,
        }
    }
}
