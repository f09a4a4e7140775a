use std::fmt;

use stagplan::Error;

pub const VALIDATION: i32 = 2;
pub const IO: i32 = 3;
pub const CONFIG: i32 = 4;

/// A failed command: a process exit code and the message printed for it.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure { code: CONFIG, message: message.into() }
    }

    pub fn io(context: &str, err: std::io::Error) -> Self {
        Failure { code: IO, message: format!("{context}: {err}") }
    }

    pub fn kind(&self) -> &'static str {
        match self.code {
            VALIDATION => "validation error",
            IO => "I/O error",
            _ => "configuration error",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_) => IO,
            Error::Config(_) | Error::UnknownScenario(_) => CONFIG,
            Error::Parse(_) | Error::Invalid(_) | Error::Structure(_) => VALIDATION,
        };
        let message = match e {
            Error::Invalid(violations) => violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("\n  "),
            other => other.to_string(),
        };
        Failure { code, message }
    }
}
