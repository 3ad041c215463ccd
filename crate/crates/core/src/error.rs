use thiserror::Error;

pub type Result<T> = std::result::Result<T, CarnotError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CarnotError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dilation factor must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("unknown builtin algebra `{0}`")]
    UnknownBuiltin(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("map has no polynomial inverse")]
    MissingInverse,

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("form is not left-invariant")]
    NotLeftInvariant,

    #[error("zero form has no weight")]
    ZeroForm,

    #[error("shrunk domain is empty")]
    EmptyDomain,

    #[error("empty test family")]
    EmptyFamily,

    #[error("trajectory left the working box at t = {0}")]
    LeftBox(f64),

    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("Newton iteration diverged: {0}")]
    NewtonDiverged(String),

    #[error("map is not contact: horizontal defect {0:e}")]
    NotContact(f64),

    #[error("invalid test pair: {0}")]
    InvalidPair(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("map is not invertible: {0}")]
    NotInvertible(String),
}
