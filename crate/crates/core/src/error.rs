use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("no regenerating vector produced a nonsingular matrix after {attempts} attempts")]
    KeySetIncoherent { attempts: usize },

    #[error("key set failed validation: messages {pairs:?} share a base row")]
    KeySetInvalid { pairs: Vec<(usize, usize)> },

    #[error("no key held for demanded message {0}")]
    MissingKey(usize),

    #[error("coded stream {0} was not received")]
    IncompleteReception(usize),

    #[error("packet {0} missing from set")]
    IncompleteSet(usize),

    #[error("inconsistent packet set: {0}")]
    Inconsistent(String),

    #[error("key sharing exhausted its budget of {budget} broadcasts with {unkeyed} messages unkeyed")]
    KeyshareBudgetExceeded { budget: usize, unkeyed: usize },

    #[error("exact enumeration infeasible for n = {n} (limit {limit})")]
    InfeasibleEnumeration { n: usize, limit: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),
}
