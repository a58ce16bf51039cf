use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("feature index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid support set: {0}")]
    InvalidSupport(String),

    #[error("truth table has {found} entries, expected {expected}")]
    TableLength { expected: usize, found: usize },

    #[error("support size {k} exceeds the enumeration limit {limit}")]
    EnumerationLimit { k: usize, limit: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("restriction has zero probability under the distribution")]
    ZeroMassRestriction,

    #[error("coordinate {0} is fixed by the restriction")]
    CoordinateFixed(usize),

    #[error("coordinate {0} is not in the junta support")]
    NotInSupport(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
