use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the selection pipeline.
///
/// Variants are grouped by the stage that raises them so callers can map
/// them onto exit codes ([`Error::category`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),

    #[error("row {row}: column `{column}`: {message}")]
    BadCell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("row {row}: timestamp {found} does not follow {previous} by exactly one hour")]
    NonContiguous {
        row: usize,
        previous: String,
        found: String,
    },

    #[error("t = {hours} is not a multiple of 24; pass --truncate-to-hours {suggested} to drop the trailing rows")]
    NotWholeDays { hours: usize, suggested: usize },

    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("series is already scaled ({0}); normalize expects raw values")]
    AlreadyScaled(&'static str),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("{kind} index {index} out of range (count {count})")]
    IndexOutOfRange {
        kind: &'static str,
        index: usize,
        count: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("empty selection")]
    EmptySelection,

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("enumeration of {count} subsets exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Data,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Geometry(_) | Error::KOutOfRange { .. } | Error::EnumerationCap { .. } => {
                ErrorCategory::Config
            }
            _ => ErrorCategory::Data,
        }
    }
}
