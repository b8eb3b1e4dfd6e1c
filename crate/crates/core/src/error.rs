use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),
    #[error("invalid partition {partition:?}: {reason}")]
    InvalidPartition { partition: Vec<u32>, reason: String },
    #[error("invalid angle {angle}: {reason}")]
    InvalidAngle { angle: f64, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("group mismatch: expected {expected}, got {got}")]
    GroupMismatch { expected: String, got: String },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("rotation axis has norm {0}, expected 1")]
    InvalidAxis(f64),
    #[error("truncation too small: tail bound {tail_bound:e} exceeds tolerance {tolerance:e} at max weight {max_weight}")]
    TruncationTooSmall {
        max_weight: u32,
        tail_bound: f64,
        tolerance: f64,
    },
    #[error("finite-difference step underflow at z = {z}: {reason}")]
    StepUnderflow { z: f64, reason: String },
    #[error("empty sample")]
    EmptySample,
    #[error("invalid p-value method parameters: {0}")]
    InvalidMethodParams(String),
}
