use thiserror::Error;

/// Errors produced by measure construction, divergences, transport and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure has no atoms")]
    EmptySupport,

    #[error("weight {0} is negative beyond rounding tolerance")]
    NegativeWeight(f64),

    #[error("total mass must be positive and finite, got {0}")]
    InvalidTotalMass(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("non-finite coordinate or value")]
    NonFinite,

    #[error("point of dimension zero")]
    ZeroDimension,

    #[error("forward map has no entries")]
    EmptyMap,

    #[error("forward map lists input point {0} more than once")]
    DuplicateTheta(usize),

    #[error("atom {0} of the input measure has no tabulated image")]
    UnmappedAtom(usize),

    #[error("atom {0} lies outside the range of the map")]
    AtomOutsideRange(usize),

    #[error("data measure puts no mass on the range of the map")]
    ZeroMassOnRange,

    #[error("mass {0} outside (0, 1]")]
    InvalidMass(f64),

    #[error("range is empty")]
    EmptyRange,

    #[error("support of size {size} exceeds the limit {limit}")]
    SupportTooLarge { size: usize, limit: usize },

    #[error("exponent p = {0} must be at least 1")]
    InvalidExponent(f64),

    #[error("unknown generator {0:?}; expected kl, chi2, tv or hellinger")]
    UnknownGenerator(String),

    #[error("unknown ground metric {0:?}; expected l2 or l1")]
    UnknownMetric(String),

    #[error("generator {0} is not smooth enough for the iterative solver")]
    NonSmoothGenerator(&'static str),

    #[error("invalid solver options: {0}")]
    InvalidOptions(&'static str),

    #[error("range of size {size} is too large for the grid oracle (limit {limit})")]
    RangeTooLarge { size: usize, limit: usize },

    #[error("grid resolution {steps} outside 1..={limit}")]
    GridTooFine { steps: usize, limit: usize },

    #[error("posterior normalizer underflowed to zero")]
    DegenerateNormalizer,

    #[error("transport solver failed to certify optimality: {0}")]
    Certificate(String),

    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
