use thiserror::Error;

/// Errors produced by the frame, metric, design and detection routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("index {index} out of range for {len} columns")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid dimensions: {0}")]
    InvalidDims(String),
    #[error("invalid sparsity level k={k} for N={n}")]
    InvalidK { k: usize, n: usize },
    #[error("matrix is not Hermitian (symmetry defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("column {index} has zero norm")]
    ZeroColumn { index: usize },
    #[error("enumeration of {count} platforms exceeds budget {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
    #[error("columns do not share a common norm (spread {spread:e})")]
    NonUniformFrame { spread: f64 },
    #[error("lemma coefficient is singular at m/N = 1/2")]
    SingularA,
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("duplicate row index {0} in selection")]
    DuplicateRows(usize),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("measurement matrix is not tight (defect {defect:e})")]
    NotTight { defect: f64 },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
