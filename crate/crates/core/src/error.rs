use thiserror::Error;

/// Errors produced while building distributions, running the solver or
/// verifying its output.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HdrError {
    #[error("invalid mass {mass} at x = {x}")]
    InvalidMass { x: i64, mass: f64 },

    #[error("duplicate key x = {x} in mass table (line {line})")]
    DuplicateKey { x: i64, line: usize },

    #[error("improper mass function: {0}")]
    ImproperPmf(String),

    #[error("invalid distribution: {0}")]
    Spec(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("malformed table line {line}: {message}")]
    Table { line: usize, message: String },

    #[error("empty support: lower bound {min} exceeds upper bound {max}")]
    EmptySupport { min: f64, max: f64 },

    #[error("sequence index must be positive, got {0}")]
    Index(u64),

    #[error("sequence function is not injective: element {element} repeated at index {index}")]
    DuplicateElement { element: i64, index: u64 },

    #[error("cover probability must lie in [0, 1], got {0}")]
    CoverProb(f64),

    #[error(
        "termination not reached after visiting {visited} elements \
         (outside mass {out_prob:e}, smallest region mass {min_prob:e})"
    )]
    TerminationNotReached {
        visited: u64,
        out_prob: f64,
        min_prob: f64,
    },

    #[error("solver invariant violated: {0}")]
    Invariant(String),

    #[error("{count} canonical solutions exceed the enumeration cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("support of {size} elements exceeds the exhaustive-search cap of {cap}")]
    SupportTooLarge { size: u64, cap: u64 },

    #[error("region element {0} is not in the search set")]
    NotInSearchSet(i64),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for HdrError {
    fn from(e: std::io::Error) -> Self {
        HdrError::Io(e.to_string())
    }
}

pub type Result<T, E = HdrError> = std::result::Result<T, E>;
