use thiserror::Error;

use crate::basis::BasisTag;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u32, right: u32 },

    #[error("unsupported form/modulus combination: {0}")]
    UnsupportedForm(String),

    #[error("non-integral exponent configuration: {0}")]
    NonIntegralExponent(String),

    #[error("series carries no weight and none was supplied")]
    MissingWeight,

    #[error("precision {have} too low, need at least {need}")]
    PrecisionTooLow { need: usize, have: usize },

    #[error("coefficient accessor has no value at index {index}")]
    AccessorRange { index: u64 },

    #[error("{ell} divides n = {n}")]
    EllDividesN { ell: u64, n: u64 },

    #[error("image left the span of {basis:?} at degree bound {degree_bound}: coefficient {index} is nonzero")]
    ResidualNonzero {
        basis: BasisTag,
        degree_bound: usize,
        index: usize,
    },

    #[error("no zero iterate after {ceiling} applications (k = {k})")]
    CeilingExceeded { k: u64, ceiling: usize },

    #[error("bound violated at k = {k}: index {index} > bound {bound}")]
    BoundViolated { k: u64, index: usize, bound: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("{0} exceeds the supported range")]
    TooLarge(String),

    #[error("operator phase failed: {0}")]
    OperatorPhase(String),
}
