use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("cannot invert zero")]
    ZeroInversion,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("degree bound violated: degree {degree} exceeds bound {bound}")]
    DegreeBoundViolation { degree: usize, bound: usize },
    #[error("enumeration of {size} elements exceeds cap {cap}")]
    EnumerationCapExceeded { size: u128, cap: u64 },
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("norm of the zero polynomial is undefined")]
    ZeroPolynomialNorm,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("degree {degree} is below the minimum {min}")]
    DegreeTooSmall { degree: usize, min: usize },
    #[error("character must be non-trivial")]
    TrivialCharacter,
    #[error("invalid cutoffs u={u}, v={v} for n={n}: need 1 <= u,v and u+v < n")]
    InvalidCutoffs { n: usize, u: usize, v: usize },
    #[error("no admissible cutoffs for degree {0}")]
    InvalidDegree(usize),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
