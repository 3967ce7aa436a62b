use thiserror::Error;

use crate::fock::ModeIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode {0} is not in the registry")]
    UnknownMode(ModeIndex),

    #[error("mode {0} has already been read out")]
    ModeAbsorbed(ModeIndex),

    #[error("duplicate mode {0} in registry")]
    DuplicateMode(ModeIndex),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("encoding error: {0}")]
    Encoding(String),

    #[error("line {line}, column {column}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        column: usize,
        token: String,
        message: String,
    },

    #[error("line {line}: {source}")]
    Runtime {
        line: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
