use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed TOML or a value of the wrong type. TOML errors carry their
    /// own line and column.
    #[error("cannot parse config {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("unknown experiment `{0}`; expected one of dispersion, ep-scan, scaling, edge, deform, walk, winding")]
    UnknownExperiment(String),

    #[error("unknown preset `{0}`; see `list-presets`")]
    UnknownPreset(String),

    #[error("{experiment} experiment failed ({context}): {source}")]
    Experiment {
        experiment: String,
        context: String,
        #[source]
        source: emitter_chain::Error,
    },

    #[error("table is not rectangular: row {row} has {found} values for {expected} columns")]
    Ragged { row: usize, found: usize, expected: usize },

    #[error("non-finite value {value} in column `{column}`, row {row}")]
    NonFinite { column: String, row: usize, value: f64 },

    #[error("bad number {text:?} in {path}, row {row}, column `{column}`")]
    BadNumber { path: PathBuf, row: usize, column: String, text: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("metadata serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Short class name printed alongside the message.
    pub fn class(&self) -> &'static str {
        match self {
            Self::Parse { .. } | Self::Validation { .. } | Self::UnknownExperiment(_) | Self::UnknownPreset(_) => "config",
            Self::Experiment { .. } => "numerics",
            Self::Ragged { .. } | Self::NonFinite { .. } | Self::BadNumber { .. } | Self::Json(_) => "data",
            Self::Io { .. } | Self::Csv { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            "config" => 2,
            "numerics" => 3,
            "data" => 4,
            _ => 5,
        }
    }

    pub(crate) fn invalid(field: &str, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
