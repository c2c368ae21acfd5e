use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("torus dimensions must both exceed 1, got {m}x{n}")]
    InvalidDims { m: u64, n: u64 },

    #[error("point ({x},{y}) does not lie on T({m}x{n})")]
    PointOutOfRange { x: u64, y: u64, m: u64, n: u64 },

    #[error("duplicate point ({x},{y}) in configuration")]
    DuplicatePoint { x: u64, y: u64 },

    #[error("direction ({u},{v}) is not a valid line direction on T({m}x{n}): {reason}")]
    InvalidDirection {
        u: u64,
        v: u64,
        m: u64,
        n: u64,
        reason: &'static str,
    },

    #[error("points must be pairwise distinct")]
    NonDistinctPoints,

    #[error("{what} = {value} is out of range (expected {expected})")]
    OutOfRange {
        what: &'static str,
        value: u64,
        expected: String,
    },

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("torus has {cells} cells, above the enumeration cap of {cap}")]
    CapExceeded { cells: u64, cap: u64 },

    #[error("search for {what} gave up after {iterations} iterations")]
    SearchCapExceeded { what: &'static str, iterations: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
