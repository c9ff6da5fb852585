use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{0} is not a Hall divisor of {1}")]
    NotHall(u64, u64),
    #[error("order violation: {0}")]
    OrderViolation(String),
    #[error("integrity failure: {0}")]
    Integrity(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("unknown format {0}")]
    UnknownFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
