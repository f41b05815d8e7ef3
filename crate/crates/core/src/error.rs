use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("record {index}: {message}")]
    Parse { index: usize, message: String },

    #[error("record {index}: {message}")]
    Invalid { index: usize, message: String },

    #[error("unknown gesture label {0:?}")]
    UnknownLabel(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("signal of length {len} is too short for {levels} level(s) of {wavelet} (max {max})")]
    TooShort {
        len: usize,
        levels: usize,
        wavelet: &'static str,
        max: usize,
    },

    #[error("inconsistent decomposition: {0}")]
    Inconsistent(String),

    #[error("constant vector")]
    ConstantVector,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("fold {fold} has no usable test traces")]
    EmptyFold { fold: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml: {0}")]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
