use thiserror::Error;

/// Errors produced while building, querying, or (de)serializing an index.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("position {pos} out of bounds (length {len})")]
    OutOfBounds { pos: usize, len: usize },

    #[error("occurrence {nth} not found")]
    NotFound { nth: usize },

    #[error("unknown object {0}")]
    UnknownObject(u32),

    #[error("duplicate object {0}")]
    DuplicateObject(u32),

    #[error("cell ({x}, {y}) outside the {side}x{side} grid")]
    OffGrid { x: i64, y: i64, side: u64 },

    #[error("displacement ({dx}, {dy}) exceeds the spiral radius bound {bound}")]
    RadiusExceeded { dx: i64, dy: i64, bound: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid dataset: {0}")]
    InvalidData(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("truncated input while reading {0}")]
    Truncated(&'static str),

    #[error("bad magic number")]
    BadMagic,

    #[error("unsupported format version {0}")]
    Version(u16),

    #[error("checksum mismatch in section {0}")]
    Checksum(&'static str),

    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
