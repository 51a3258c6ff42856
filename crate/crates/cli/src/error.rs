use std::fmt;
use std::path::Path;

use serde_json::json;

/// Failure classes, each with its own exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CliError {
    /// Malformed or unknown configuration.
    Config(String),
    /// Parameters parse but violate an operation's preconditions.
    Precondition(String),
    /// A dense state or table would exceed its capacity cap.
    Capacity(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Capacity(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Precondition(_) => "precondition",
            CliError::Capacity(_) => "capacity",
            CliError::Io(_) => "io",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Precondition(m) | CliError::Capacity(m) | CliError::Io(m) => m,
        }
    }

    /// One line of JSON for stderr.
    pub fn to_json(&self) -> String {
        json!({
            "error": self.kind(),
            "code": self.exit_code(),
            "message": self.message(),
        })
        .to_string()
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        CliError::Precondition(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl std::error::Error for CliError {}

impl From<nocollapse_core::Error> for CliError {
    fn from(e: nocollapse_core::Error) -> Self {
        if e.is_capacity() {
            CliError::Capacity(e.to_string())
        } else {
            CliError::Precondition(e.to_string())
        }
    }
}
