use thiserror::Error;

/// Errors shared by every engine in the workbench.
#[derive(Debug, Error)]
pub enum PalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} out of range: {value} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("syntax error at byte {offset}: found {found:?}, expected one of {expected:?}")]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },

    #[error("unbound variable {0:?}")]
    UnboundVariable(String),

    #[error("unknown operator {0}")]
    UnknownOperator(String),

    #[error("element does not fit the algebra: {0}")]
    InvalidElement(String),

    #[error("malformed partition: {0}")]
    MalformedPartition(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("no atom below the required element")]
    NoAtomBelow,

    #[error("operation defined only on nonzero elements")]
    ZeroElement,

    #[error("certificate inconsistent with the supplied vector")]
    CertificateMismatch,

    #[error("no valid coordinate permutation exists for this certificate")]
    NoValidPermutation,

    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u16, u16),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PalgError>;

/// Guard for the hard size limits; `what` names the quantity for the report.
pub fn capacity(what: &'static str, requested: usize, limit: usize) -> Result<()> {
    if requested > limit {
        Err(PalgError::Capacity {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
