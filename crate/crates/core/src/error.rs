//! Error types shared across the crate.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Top-level error for all fallible operations.
#[derive(Debug)]
pub enum Error {
    /// Invalid configuration or parameter value.
    Config(String),
    /// Malformed, inconsistent, or incompatible input data.
    Data(String),
    /// Tensor or layer shape mismatch.
    Shape(String),
    /// Dataset/model file format violation.
    Format(FormatError),
    /// Numeric failure: divergence, non-finite values, failed gradient check.
    Numeric(String),
    /// Underlying I/O failure.
    Io(std::io::Error),
}

/// Distinct file-format error codes for the binary dataset and model files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormatError {
    BadMagic { expected: [u8; 4], found: [u8; 4] },
    UnsupportedVersion { found: u32, supported: u32 },
    /// Payload shorter than the header declares.
    TruncatedPayload { expected: u64, found: u64 },
    /// Unparseable or internally inconsistent header.
    CorruptHeader(String),
    /// Declared shapes do not match the payload or each other.
    ShapeMismatch(String),
    /// A label byte outside {0, 1}.
    BadLabel(u8),
    /// Bytes left over after the declared payload.
    TrailingBytes(u64),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Data(msg) => write!(f, "data error: {msg}"),
            Error::Shape(msg) => write!(f, "shape error: {msg}"),
            Error::Format(e) => write!(f, "format error: {e}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::BadMagic { expected, found } => write!(
                f,
                "bad magic: expected {:?}, found {:?}",
                String::from_utf8_lossy(expected),
                found
            ),
            FormatError::UnsupportedVersion { found, supported } => {
                write!(f, "unsupported version {found} (supported: {supported})")
            }
            FormatError::TruncatedPayload { expected, found } => {
                write!(f, "truncated payload: expected {expected} bytes, found {found}")
            }
            FormatError::CorruptHeader(msg) => write!(f, "corrupt header: {msg}"),
            FormatError::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            FormatError::BadLabel(b) => write!(f, "label byte {b} outside {{0, 1}}"),
            FormatError::TrailingBytes(n) => write!(f, "{n} trailing bytes after payload"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl std::error::Error for FormatError {}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<FormatError> for Error {
    fn from(e: FormatError) -> Self {
        Error::Format(e)
    }
}
