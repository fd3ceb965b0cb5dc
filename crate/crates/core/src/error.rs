use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("no external prediction for {0}")]
    MissingPrediction(String),

    #[error("series length {got} does not match the trained length {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("series too short for {test}: {message}")]
    TooShort { test: &'static str, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
