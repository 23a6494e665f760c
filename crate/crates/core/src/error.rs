use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    #[error("ingestion error in {path} (row {row}, column {column}): {reason}")]
    Ingestion {
        path: PathBuf,
        row: usize,
        column: String,
        reason: String,
    },

    #[error("cannot sample {requested} instances from class {class} (only {available} available)")]
    Sampling {
        class: usize,
        requested: usize,
        available: usize,
    },

    #[error("ciphertext does not belong to this key")]
    Integrity,

    #[error("fixed-point value {value} is outside the encodable range")]
    Range { value: f64 },

    #[error("metric error: {0}")]
    Metric(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
