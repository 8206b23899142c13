use thiserror::Error;

use crate::io::Diagnostic;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("variable x{index} has no value in an assignment of length {len}")]
    MissingVariable { index: usize, len: usize },
    #[error("pair (x{0}, x{1}) does not occur in any monomial")]
    PairNotPresent(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("adjacency matrix must be square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("diagonal entry for v{0} must be 0")]
    NonZeroDiagonal(usize),
    #[error("weight at (v{0}, v{1}) is not finite")]
    NonFinite(usize, usize),
    #[error("vertex v{vertex} is out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("no edge from v{0} to v{1}")]
    MissingEdge(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodingError {
    #[error("position {position} out of range 1..={max}")]
    PositionOutOfRange { position: usize, max: usize },
    #[error("vertex v{vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("path index {path} out of range (have {n_paths} paths)")]
    PathOutOfRange { path: usize, n_paths: usize },
    #[error("path {path} has {len} vertices, expected exactly {expected}")]
    WrongPathLength {
        path: usize,
        len: usize,
        expected: usize,
    },
    #[error("expected {expected} paths, got {got}")]
    WrongPathCount { expected: usize, got: usize },
    #[error("invalid encoding settings: {0}")]
    InvalidSettings(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("problem specification is invalid ({} error(s))", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error("compiled problem needs more than {cap} variables")]
    VariableCap { cap: usize },
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OutputError {
    #[error("polynomial has degree {0}, a QUBO needs degree <= 2")]
    DegreeTooHigh(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(
        "brute force over {n} variables exceeds the cap of {cap}; use simulated annealing instead"
    )]
    CapExceeded { n: usize, cap: usize },
    #[error("assignment has {got} entries, expected {expected}")]
    AssignmentLength { expected: usize, got: usize },
}
