use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    Empty,

    #[error("nonpositive weight at index {0}")]
    NonPositiveWeight(usize),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("shape mismatch: expected {expected:?}, got {actual:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown kind: {0}")]
    UnknownKind(String),

    #[error("duplicate plan entry at ({0}, {1})")]
    DuplicateEntry(usize, usize),

    #[error("negative mass at ({0}, {1}) in an unsigned plan")]
    NegativeMass(usize, usize),

    #[error("plan index ({0}, {1}) out of range")]
    IndexOutOfRange(usize, usize),

    #[error("operation requires a nonnegative plan")]
    SignedPlan,

    #[error("size bound exceeded: {0}")]
    SizeBound(String),

    #[error("certificate check failed: {0}")]
    Certificate(String),

    #[error("solver did not converge: {0}")]
    Solver(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// Errors that come from bad caller input rather than a solver fault.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Certificate(_) | Error::Solver(_))
    }
}
