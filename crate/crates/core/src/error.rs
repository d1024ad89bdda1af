use thiserror::Error;

/// Errors raised by field arithmetic, bound computation and enumeration.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid conductor {n}: {reason}")]
    InvalidConductor { n: u64, reason: String },

    #[error("elements belong to different fields (conductors {0} and {1})")]
    FieldMismatch(u64, u64),

    #[error("zero element where a nonzero one is required")]
    ZeroElement,

    #[error("element is not divisible by the given divisor")]
    NotDivisible,

    #[error("expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("conductor {0} is not prime; supply a unit basis file")]
    NotPrime(u64),

    #[error("unit basis must have {expected} generators, got {actual}")]
    BasisCount { expected: usize, actual: usize },

    #[error("generator {index} is not a unit (norm {norm})")]
    NonUnit { index: usize, norm: String },

    #[error("unit generators are multiplicatively dependent (log determinant {0})")]
    DependentUnits(String),

    #[error("degenerate simplex for permutation {perm:?}: det B_{column} encloses zero")]
    DegenerateSimplex { perm: Vec<usize>, column: usize },

    #[error("Gram matrix is not certifiably positive definite")]
    NotPositiveDefinite,

    #[error("enumeration node budget of {0} exceeded")]
    NodeBudgetExceeded(u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cusp expansion disagrees with enumeration: {0}")]
    CuspMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
