use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("image dimensions must be non-zero (got {width}x{height})")]
    ZeroDimension { width: usize, height: usize },
    #[error("pixel buffer holds {actual} values, expected {expected}")]
    PixelCount { expected: usize, actual: usize },
    #[error("image dimensions differ: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },
    #[error("image {width}x{height} is smaller than the required {required}x{required}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        required: usize,
    },
    #[error("histogram sums to {actual}, expected tile area {expected}")]
    HistogramSum { expected: u64, actual: u64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("need at least {required} samples, got {actual}")]
    TooFewSamples { required: usize, actual: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("feature dimensions differ: {left} vs {right}")]
    FeatureDimMismatch { left: usize, right: usize },
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("matrix has eigenvalue {value:e} below the PSD tolerance")]
    NotPsd { value: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("probability row {row} is invalid: {reason}")]
    InvalidProbRow { row: usize, reason: String },
    #[error("score is not a valid {metric} value: {value}")]
    InvalidScore { metric: &'static str, value: f64 },
    #[error("dataset does not match the simulator spec: {0}")]
    SpecMismatch(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
