use std::fmt;

use thiserror::Error;

/// Why an elementary triangular operation cannot be applied to a matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Restriction {
    /// An index lies outside `1..=n` or the pair is ordered the wrong way.
    BadIndices,
    /// F: `t[r2][j]` must vanish for every `j >= r1`.
    SwapRowNotZero { r2: usize, j: usize },
    /// F: `t[r][r1]` must vanish for every `r1 < r < r2`.
    SwapColumnNotZero { r: usize, r1: usize },
    /// Q: row `r0` must vanish to the right of `k0`.
    ShearRowNotZero { r0: usize, j: usize },
    /// Q: `Δ^(1)_{i,k0,r0}(T)` must equal `β·t[k0][i]`.
    ShearDeltaMismatch { i: usize },
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Restriction::BadIndices => write!(f, "indices out of range"),
            Restriction::SwapRowNotZero { r2, j } => {
                write!(f, "entry ({r2},{j}) must be zero")
            }
            Restriction::SwapColumnNotZero { r, r1 } => {
                write!(f, "entry ({r},{r1}) must be zero")
            }
            Restriction::ShearRowNotZero { r0, j } => {
                write!(f, "entry ({r0},{j}) must be zero")
            }
            Restriction::ShearDeltaMismatch { i } => {
                write!(f, "delta condition fails at column {i}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic 2 is not supported")]
    CharTwo,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large (must be below 2^31)")]
    ModulusTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("operation requires a finite field")]
    InfiniteField,
    #[error("indices must satisfy i < j < k, got ({i},{j},{k})")]
    IndexOrder { i: usize, j: usize, k: usize },
    #[error("index out of range: {0}")]
    BadIndex(String),
    #[error("degree {0} is not even")]
    BadDegree(usize),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("morphism has not been verified as a homomorphism")]
    UnverifiedMorphism,
    #[error("matrix is singular")]
    Singular,
    #[error("target of the first morphism is not the source of the second")]
    SourceTargetMismatch,
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("restriction violated{}: {reason}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    RestrictionViolated {
        step: Option<usize>,
        reason: Restriction,
    },
    #[error("matrix is not in the class of the zero matrix")]
    NotInZeroClass,
    #[error("wrong matrix size: expected {expected}, got {got}")]
    BadSize { expected: usize, got: usize },
    #[error("search budget of {0} nodes exceeded")]
    BudgetExceeded(u64),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn restriction(reason: Restriction) -> Self {
        Error::RestrictionViolated { step: None, reason }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
