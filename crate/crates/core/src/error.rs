use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the matching pipeline and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function (graphon coordinates,
    /// probabilities outside `[0, 1]`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A size requirement was violated (empty inputs, mismatched dimensions).
    #[error("size error: {0}")]
    Size(String),

    /// A configuration parameter is out of range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Malformed input data (non-square or non-finite matrices, bad files).
    #[error("input error: {0}")]
    Input(String),

    /// A documented precondition of an operation does not hold.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// A configuration document failed to parse or validate.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A pipeline failure inside one experiment cell.
    #[error("experiment cell n={n} replicate={replicate}: {source}")]
    Cell {
        n: usize,
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Short machine-readable tag for the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Size(_) => "size",
            Error::Parameter(_) => "parameter",
            Error::Input(_) => "input",
            Error::Precondition(_) => "precondition",
            Error::Config { .. } => "config",
            Error::Io { .. } => "io",
            Error::Cell { source, .. } => source.kind(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
