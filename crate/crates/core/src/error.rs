use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters n={n}, k={k}: {reason}")]
    InvalidParams { n: u32, k: u32, reason: &'static str },

    #[error("rank {rank} out of range (vertex count {count})")]
    RankOutOfRange { rank: u64, count: u64 },

    #[error("invalid k-set: {0}")]
    InvalidSet(String),

    #[error("element {0} out of range")]
    ElementOutOfRange(u32),

    #[error("{what} exceeds limit ({value} > {limit})")]
    LimitExceeded { what: &'static str, value: u64, limit: u64 },

    #[error("family has size {got}, expected {expected}")]
    WrongFamilySize { got: usize, expected: u64 },

    #[error("family is a star")]
    StarFamily,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("certificate search exhausted {tries} tries")]
    TriesExhausted { tries: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
