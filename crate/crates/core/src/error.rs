use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("total dimension {total} exceeds cap {cap}")]
    DimensionCap { total: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch { expected: usize, rows: usize, cols: usize },

    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),

    #[error("factor index {index} out of range for {n_factors} factors")]
    FactorOutOfRange { index: usize, n_factors: usize },

    #[error("factor sets overlap at factor {0}")]
    OverlappingFactorSets(usize),

    #[error("element is not self-adjoint (max |x - x*| = {0:e})")]
    NotSelfAdjoint(f64),

    #[error("element is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("Schatten exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("unbound polynomial input `{0}`")]
    UnboundInput(String),

    #[error("unknown polynomial input `{0}`")]
    UnknownInput(String),

    #[error("polynomial parse error at byte {pos}: {msg}")]
    PolyParse { pos: usize, msg: String },

    #[error("leave-one-out function {index} references its own input `{name}`")]
    ForbiddenInput { index: usize, name: String },

    #[error("expected {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("serialization: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
