use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument {value} outside the domain [{lower}, {upper}]")]
    Domain { value: f64, lower: f64, upper: f64 },

    #[error("unsupported quadrature order {0} (expected 1..=64)")]
    UnsupportedOrder(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid method configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("singular matrix in linear solve")]
    SingularMatrix,

    #[error("recovered alpha[{index}] = {value:e} exceeds overflow bound")]
    AlphaOverflow { index: usize, value: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("reference solution not self-consistent: resolutions differ by {difference:e}")]
    ReferenceInconsistent { difference: f64 },
}
