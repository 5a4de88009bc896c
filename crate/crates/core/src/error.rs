use std::fmt;

use thiserror::Error;

/// One problem found while validating a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Dotted key the problem is attached to, e.g. `epsilon.p` or `arms[1]`.
    pub key: String,
    /// 1-based line in the source text, when the key could be located.
    pub line: Option<usize>,
    pub message: String,
}

impl Violation {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: `{}`: {}", self.key, self.message),
            None => write!(f, "`{}`: {}", self.key, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid exploration schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid configuration:\n{}", format_violations(.0))]
    InvalidConfig(Vec<Violation>),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The individual violations, when this is a configuration error.
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::InvalidConfig(v) => v,
            _ => &[],
        }
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
