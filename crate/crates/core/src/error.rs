use thiserror::Error;

/// Errors raised by model validation, explanation and assessment.
///
/// `index` fields are 0-based; messages number features from 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("instance has {got} values but the model has {expected} features")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("feature {}: {reason}", .index + 1)]
    InvalidFeature { index: usize, reason: String },

    #[error("feature {}: value {value} outside its domain", .index + 1)]
    OutOfDomain { index: usize, value: f64 },

    #[error("feature {} is real-valued with zero weight and has no literal", .index + 1)]
    ZeroWeight { index: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("problem is infeasible: sum of deltas does not reach phi")]
    Infeasible,

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("empty explanation stream")]
    EmptyStream,

    #[error("heuristic explanation is empty")]
    EmptyHeuristic,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
