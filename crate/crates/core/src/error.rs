use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("size vector {sizes:?} does not sum to t = {t}")]
    SizeVectorSum { t: usize, sizes: Vec<usize> },
    #[error("invalid size vector: {0}")]
    InvalidSizes(String),
    #[error("malformed subset: {0}")]
    MalformedSubset(String),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: String, limit: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{t} is not divisible by {k}")]
    NotDivisible { t: usize, k: usize },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
