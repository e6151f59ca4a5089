use thiserror::Error;

use crate::report::CheckReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("degree error: expected {expected}, found {found}")]
    Degree { expected: String, found: String },

    #[error("shape error: {0}")]
    Shape(String),

    #[error("endomorphism is not skew-symmetric: basis pair ({row}, {col}) violates I* = -I")]
    NotSkew { row: usize, col: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("structure constants are not antisymmetric at c^{a}_({b},{c})")]
    NotAntisymmetric { a: usize, b: usize, c: usize },

    #[error("structure is not a Lie structure: {0}")]
    NotLie(String),

    #[error("bivector is not Poisson with respect to the given Lie structure")]
    NotPoisson,

    #[error("cyclic products disagree: position {first} vs position {second}")]
    CyclicMismatch { first: usize, second: usize },

    #[error("swap pattern {0:?} is not one of the certified patterns (none, 23, 13, 12)")]
    UnsupportedSwapPattern(Vec<usize>),

    #[error("sign triple is not in normal form (third sign must be -1); apply a cyclic shift first")]
    NotNormalForm,

    #[error("sign triple has product +1; operation requires product -1")]
    ProductPlusOne,

    #[error("precondition failed: {what}")]
    Precondition {
        what: String,
        report: Option<Box<CheckReport>>,
    },

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn degree(expected: impl Into<String>, found: impl Into<String>) -> Self {
        Error::Degree {
            expected: expected.into(),
            found: found.into(),
        }
    }
}
