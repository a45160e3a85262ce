use std::fmt;
use std::process::ExitCode;

use catgraph::Error;

/// A failed command: an input problem (exit 2) or a resource cap (exit 3).
#[derive(Debug)]
pub struct Failure {
    pub message: String,
    pub cap: bool,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            cap: false,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(if self.cap { 3 } else { 2 })
    }
}

pub fn is_cap(e: &Error) -> bool {
    matches!(
        e,
        Error::CapExceeded { .. } | Error::TooManyOddCategories(_) | Error::SubsetTooLarge(_) | Error::TooLarge(_)
    )
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            cap: is_cap(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
