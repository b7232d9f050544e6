//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by configuration validation, numeric evaluation, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration invariant was violated. The message names the invariant.
    #[error("configuration error: {0}")]
    Config(String),

    /// Operands handed to an operation have inconsistent dimensions.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A computation produced a non-finite or unstable intermediate value.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Invalid rational-function arithmetic, e.g. division by the zero function.
    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code associated with this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Dimension(_) => 2,
            Error::Numerical(_) | Error::Arithmetic(_) => 3,
            Error::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
