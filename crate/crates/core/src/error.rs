/// Errors reported by the library.
///
/// Domain-negative answers (a disturbing behavior fed to `check`, an
/// infeasible conversion) are ordinary return values, not errors. Errors mean
/// the request itself was ill-posed or exceeded a capacity cap.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimension mismatch, bad parameter
    /// range, precondition violation).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The request is well formed but beyond a configured enumeration cap.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Text or JSON that could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
