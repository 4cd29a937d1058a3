use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("element is not invertible modulo the ideal polynomial")]
    NotInvertible,
    #[error("invalid parameters: {0}")]
    Domain(String),
    #[error("malformed encoding: {0}")]
    Format(String),
    #[error("no invertible selection of rows exists")]
    Singular,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
