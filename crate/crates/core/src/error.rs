use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index out of bounds: {index} >= {bound}")]
    IndexOutOfBounds { index: usize, bound: usize },

    #[error("duplicate index {0}")]
    DuplicateIndex(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} = {value} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("n = {n} exceeds the exhaustive goodness cap {cap}; use monte_carlo_goodness")]
    GoodnessCapExceeded { n: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("strong approximation undefined for unsatisfiable f")]
    StrongUndefined,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("circuit is not a validated d-DNNF: {0}")]
    NotDdnnf(String),

    #[error("not a rectangle: model group of gate {gate} is not a product set")]
    NotARectangle { gate: usize },

    #[error("cover construction failed: {0}")]
    CoverConstruction(String),

    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
