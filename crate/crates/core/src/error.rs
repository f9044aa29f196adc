use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point index {index} out of range for space of {len} points")]
    PointOutOfRange { index: usize, len: usize },

    #[error("value must be nonnegative: {0}")]
    NegativeValue(String),

    #[error("set outside the gauge's admissible domain: {0}")]
    OutsideGaugeDomain(String),

    #[error("family member {index} is not in the filtered family ({reason})")]
    NotInFilteredFamily { index: usize, reason: String },

    #[error("covering relation is not fine at point {point} ({semantics})")]
    NotFine { point: String, semantics: String },

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
