use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("bit vector has {got} bits but the function has {expected} variables")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("function is not {{0,1}}-valued at x = {index}")]
    NotBoolean { index: usize },

    #[error("step index {n} outside 1..={m}")]
    StepOutOfRange { n: usize, m: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("seed pair is not complementary (max residual {residual:.3e})")]
    InvalidSeed { residual: f64 },

    #[error("sequences must be non-empty")]
    EmptySequence,

    #[error("sequence is identically zero")]
    ZeroSequence,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("index constraint violated: {0}")]
    IndexConstraint(String),

    #[error("enumeration size {size} exceeds guard {limit}")]
    GuardExceeded { size: u128, limit: u128 },

    #[error("symbolic expansion supports m <= {max}, got {m}")]
    TooLarge { m: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
