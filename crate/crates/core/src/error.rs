use thiserror::Error;

pub type Result<T, E = CedaError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CedaError {
    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: expected {expected} records, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("label {label} out of range for cardinality {cardinality}")]
    LabelOutOfRange { label: u32, cardinality: u32 },

    #[error("degenerate feature: all quantile edges are equal")]
    DegenerateFeature,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("feature `{0}` is not numeric")]
    NotNumeric(String),
}

impl CedaError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CedaError::InvalidParameter(msg.into())
    }
}
