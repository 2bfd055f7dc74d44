use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("expected {expected} actions, got {got}")]
    ActionCountMismatch { expected: usize, got: usize },

    #[error("shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("action id {0} is outside the action table")]
    UnknownAction(u32),

    #[error("unknown policy: {0}")]
    UnknownPolicy(String),

    #[error("corrupt replay at line {line}: {message}")]
    CorruptReplay { line: usize, message: String },

    #[error("replay written by engine {found}, this is {expected}")]
    VersionMismatch { expected: String, found: String },

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
