use thiserror::Error;

use crate::padic::Place;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("tower parameters differ: (a, m) = {left:?} vs {right:?}")]
    ParamMismatch { left: (i64, i64), right: (i64, i64) },

    #[error("element is a zero divisor in the tower ring for (a, m) = ({a}, {m})")]
    ZeroDivisor { a: i64, m: i64 },

    #[error("degenerate surface parameters (a, m) = ({a}, {m}): need a, m and m - 4a nonzero")]
    Degenerate { a: i64, m: i64 },

    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error(
        "Hensel criterion fails: v(f(x0)) = {value_valuation}, v(f'(x0)) = {derivative_valuation}"
    )]
    CriterionFails {
        value_valuation: u32,
        derivative_valuation: u32,
    },

    #[error("point {0:?} is singular modulo p")]
    NotSmooth([i128; 3]),

    #[error("point {0:?} does not lie on the surface")]
    NotOnSurface([i128; 3]),

    #[error("precision overflow: p^{level} does not fit the residue representation (p = {p})")]
    PrecisionOverflow { p: u64, level: u32 },

    #[error("p = {0} does not split in Q(sqrt m)")]
    NotSplit(u64),

    #[error("matrix relation violated: {0}")]
    RelationsViolated(String),

    #[error("action is not a group homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("cochain is not a cocycle")]
    NotCocycle,

    #[error("lines are equal")]
    EqualLines,

    #[error("incidence is ambiguous: the determinant is a nonzero zero divisor")]
    ZeroDivisorAmbiguity,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("unknown key: {0}")]
    UnknownKey(String),

    #[error("invalid place {0} for this operation")]
    InvalidPlace(Place),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
