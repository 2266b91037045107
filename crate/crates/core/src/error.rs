use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("need at least {needed} usable observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("no fit: {0}")]
    NoFit(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// Process exit status for each failure class.
pub mod exit_code {
    pub const IO: i32 = 1;
    pub const PARSE: i32 = 3;
    pub const VALIDATION: i32 = 4;
    pub const ESTIMATION: i32 = 5;
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Manifest(_) => exit_code::PARSE,
            Error::Validation(_) | Error::Domain(_) => exit_code::VALIDATION,
            Error::Degenerate(_) | Error::InsufficientData { .. } | Error::NoFit(_) => {
                exit_code::ESTIMATION
            }
            Error::Io { .. } => exit_code::IO,
        }
    }
}
