use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude count {got} does not match 2^{n_qubits}")]
    Length { n_qubits: usize, got: usize },

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("{requested} qubits exceeds the configured maximum of {max}")]
    Capacity { requested: usize, max: usize },

    #[error("qubit count mismatch: {0} vs {1}")]
    Dimension(usize, usize),

    #[error("invalid qubit target list {targets:?} for a {n_qubits}-qubit state: {reason}")]
    Targets {
        targets: Vec<usize>,
        n_qubits: usize,
        reason: &'static str,
    },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid operator word: {0}")]
    Word(String),

    #[error("protocol specification invalid: {0}")]
    Spec(String),

    #[error("zero-probability outcome path {0:?}")]
    ZeroProbability(Vec<String>),

    #[error("channel reconstruction failed: {0}")]
    Reconstruction(String),

    #[error("{0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
