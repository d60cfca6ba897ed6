use thiserror::Error;

/// Crate-wide error type.
///
/// The variants map onto the CLI exit codes: `Input` exits 1, `Io` exits 2.
/// `Internal` signals a broken invariant inside the simulator itself and
/// should never surface in a correct build.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
