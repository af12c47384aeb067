use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular point: {0}")]
    Singular(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("assembly produced a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("ill-conditioned system: {0}")]
    Conditioning(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("mesh parse error on line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is neither `Clone` nor `PartialEq`; keep the message only.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
