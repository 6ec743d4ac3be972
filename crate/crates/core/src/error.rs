use thiserror::Error;

/// Errors raised by the toolkit. Verdicts that come out false are not errors;
/// they are returned as certificates.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("vectors must have positive dimension")]
    ZeroDimension,

    #[error("invalid norm: {0}")]
    InvalidNorm(String),

    #[error("operation needs a nonempty graph")]
    EmptyGraph,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("enumeration cap exceeded: {0}; use check_cyclic for larger inputs")]
    CapExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("outside the grid box: {0}")]
    OutsideGrid(String),

    #[error("outside the effective domain: {0}")]
    OutsideDomain(String),

    #[error("region is empty: {0}")]
    EmptyRegion(String),

    #[error("not supported: {0}")]
    Unsupported(String),

    #[error("iteration did not converge: residual {residual:e}")]
    NoConvergence { residual: f64 },

    #[error("search exhausted: {0}")]
    SearchExhausted(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("graph is not cyclically monotone: cycle {cycle:?} has sum {sum}")]
    NotCyclicallyMonotone { cycle: Vec<usize>, sum: String },

    #[error("operator oracle failed: {0}")]
    Oracle(String),

    #[error("unknown gallery report `{0}`")]
    UnknownReport(String),
}

pub type Result<T> = std::result::Result<T, Error>;
