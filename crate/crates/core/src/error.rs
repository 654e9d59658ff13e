use thiserror::Error;

/// Errors raised by the library. Overflow guards are kept separate from
/// ordinary validation failures so callers can report them distinctly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("bound {value} exceeds the supported maximum {max}")]
    BoundTooLarge { value: u64, max: u64 },

    #[error("{0} does not fit in a 64-bit integer")]
    IntegerOverflow(String),

    #[error("empty window: no integer k satisfies the window for N = {bound}, C = {c}")]
    EmptyWindow { bound: f64, c: f64 },

    #[error("log log N must be positive, got N = {0}")]
    LogLogNotPositive(f64),

    #[error("sequence table has no entry for index {0}")]
    MissingTableEntry(usize),

    #[error("degenerate interval [{0}, {1})")]
    DegenerateInterval(f64, f64),

    #[error("the index set is empty")]
    EmptyIndexSet,

    #[error("observable is not defined on this system: {0}")]
    Incompatible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn is_overflow(&self) -> bool {
        matches!(self, Error::BoundTooLarge { .. } | Error::IntegerOverflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
