use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("basis is empty")]
    EmptyBasis,

    #[error("basis is linearly dependent (Gram singular value ratio {ratio:e})")]
    DependentBasis { ratio: f64 },

    #[error("element belongs to a different operator space")]
    SpaceMismatch,

    #[error("map action is inconsistent with its matrix definition (relative residual {residual:e})")]
    InconsistentAction { residual: f64 },

    #[error("invalid matrix level {0}; levels start at 1")]
    InvalidLevel(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("level table covers levels 1..={available} but {needed} are required")]
    InsufficientTable { needed: usize, available: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("catalog entry `{0}` has no closed form")]
    NoClosedForm(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
