use thiserror::Error;

/// Failure classes shared by every module. The CLI maps each class to an exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input object (not a bijection, size mismatch, non-Hermitian matrix, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Request exceeds a configured enumeration or memory cap.
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    /// An exhaustive verification found a counterexample.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Validation(_) => "validation",
            Error::Domain(_) => "domain",
            Error::Resource(_) => "resource",
            Error::Verification(_) => "verification",
            Error::Numerical(_) => "numerical",
        }
    }
}

macro_rules! bail {
    ($variant:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$variant(format!($($arg)*)))
    };
}
pub(crate) use bail;
