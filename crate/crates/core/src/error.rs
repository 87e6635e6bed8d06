use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("precision exhausted in {op}: {detail}")]
    Precision { op: &'static str, detail: String },
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("shape not recognized: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precision(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Precision {
        op,
        detail: detail.into(),
    }
}
