//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("source column `{column}` is missing from the header")]
    MissingColumn { column: String },

    #[error("no records survived ingestion")]
    NoRecords,

    #[error("no records remain after applying the filter")]
    EmptyAfterFilter,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("input vector is empty")]
    EmptyInput,

    #[error("length mismatch: {left} != {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("shares must be non-negative and sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("masses must be strictly positive and finite")]
    NonPositiveMass,

    #[error("rank statistics need at least {min} observations, got {n}")]
    TooFewObservations { n: usize, min: usize },

    #[error("correlation undefined: zero rank variance")]
    ZeroVariance,

    #[error("base year {0} is not present")]
    MissingBaseYear(i32),

    #[error("infeasible synthetic target: {0}")]
    InfeasibleTarget(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported format `{0}`")]
    UnsupportedFormat(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
