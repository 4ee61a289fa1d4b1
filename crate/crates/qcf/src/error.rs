use thiserror::Error;

/// Errors shared across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("polynomial must have degree >= 1")]
    BadPolynomial,
    #[error("element order exceeds cap {cap}")]
    OrderCapExceeded { cap: u64 },
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("decoded matrix is not a rank-{expected} RREF basis")]
    NotRref { expected: usize },
    #[error("duplicate codeword: {0}")]
    DuplicateWord(String),
    #[error("matrices are not conjugate")]
    NotConjugate,
    #[error("centralizer dimension {dim} exceeds enumeration cap {cap}")]
    CentralizerTooLarge { dim: usize, cap: usize },
    #[error("supplied normalizer does not normalize the group")]
    NormalizerMismatch,
    #[error("time budget exceeded")]
    TimeBudgetExceeded,
    #[error("group order cap {cap} exceeded during closure")]
    ClosureCapExceeded { cap: usize },
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("unknown bundled data item: {0}")]
    UnknownData(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
