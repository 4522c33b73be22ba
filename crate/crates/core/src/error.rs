use thiserror::Error;

/// Failures while reading or constructing a graph.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("line {line}: negative weight {value}")]
    NegativeWeight { line: usize, value: String },
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("total vertex weight overflows 64-bit arithmetic")]
    WeightOverflow,
    #[error("io error: {0}")]
    Io(String),
}

/// Errors raised by the separator algorithms and their helpers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SepError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("oracle size guard: {0}")]
    OracleGuard(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("unknown element: {0}")]
    Unknown(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = SepError> = std::result::Result<T, E>;
