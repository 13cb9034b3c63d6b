use std::io;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid prefix notation: {0}")]
    InvalidPrefix(String),
    #[error("invalid infix notation at offset {offset}: {message}")]
    InvalidInfix { offset: usize, message: String },
    #[error("symbol `{0}` occurs more than once")]
    DuplicateSymbol(char),
    #[error("character `{0}` is neither an alphabet symbol nor an operator")]
    UnknownCharacter(char),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("vertex index {index} out of range for an expression of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("instance too large for the reference matcher: {0}")]
    InstanceTooLarge(String),
    #[error("encoding is not faithful (violated conditions {0:?})")]
    NotFaithful(Vec<u8>),
    #[error("expression of size {size} does not fit in bounded size {bound}")]
    SizeExceedsBound { size: usize, bound: usize },
    #[error("string of length {len} exceeds the maximum of {max}")]
    StringTooLong { len: usize, max: usize },
    #[error("no candidate survived the beam")]
    EmptyBeam,
    #[error("no accepted string within length {0}")]
    Unsatisfiable(usize),
    #[error("gave up after {0} attempts")]
    ExhaustedRetries(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn malformed(path: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}
