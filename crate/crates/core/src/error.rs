use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("sample too small: need at least {need}, got {got}")]
    SampleTooSmall { need: usize, got: usize },
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("too many missing values: {missing} of {total}")]
    TooManyMissing { missing: usize, total: usize },
    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),
    #[error("missing data for node `{0}`")]
    MissingData(String),
    #[error("misaligned series: {0}")]
    Misaligned(String),
    #[error("inconsistent proportions: aggregate differs from root by {0}")]
    InconsistentProportions(f64),
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;
