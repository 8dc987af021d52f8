use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("instance too large: {qubits} qubits exceeds the ceiling of {ceiling}")]
    TooLarge { qubits: usize, ceiling: usize },

    #[error("non-finite matrix or vector entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid bit string {0:?}")]
    BadBits(String),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("not a density matrix: {0}")]
    NotDensity(String),

    #[error("invalid qubit subset: {0}")]
    BadSubset(String),

    #[error("invalid probability distribution: {0}")]
    BadDistribution(String),

    #[error("invalid truth table: {0}")]
    BadTruthTable(String),

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("period is indeterminate: {0}")]
    Indeterminate(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
