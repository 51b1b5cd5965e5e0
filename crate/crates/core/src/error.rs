use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("dangling edge reference: {0}")]
    DanglingEdge(String),
    #[error("edge reused: {0}")]
    EdgeReused(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("inconsistent surface: {0}")]
    Inconsistent(String),
    #[error("rank deficiency: {0}")]
    RankDeficient(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("{what} exceeded cap {cap}")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },
    #[error("unknown catalog name: {0}")]
    UnknownName(String),
    #[error("infinite value at the base point")]
    Infinite,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
