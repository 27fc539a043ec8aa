use thiserror::Error;

/// Errors produced by the model and its configuration layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent configuration. `line` is 0 for command-line
    /// overrides and programmatic input.
    #[error("config error (line {line}): {message}")]
    Config { line: usize, message: String },

    /// Inputs are well formed but outside the regime where the model holds.
    #[error("model validity: {0}")]
    ModelValidity(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config { line, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::config(0, message)
    }

    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::ModelValidity(_) => 3,
            Error::Numerical(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config { .. } => "config",
            Error::ModelValidity(_) => "model_validity",
            Error::Numerical(_) => "numerical",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
