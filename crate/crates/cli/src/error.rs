use std::fmt;

use kdvlab::Error;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Rejected configuration; `key` names the offending entry.
    Config { key: String, msg: String },
    /// A numerical routine failed or a check came out false.
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_CHECK,
            Self::Io(_) => EXIT_FAILURE,
        }
    }

    /// Core errors raised while running `section`. Argument errors point at the
    /// section; everything numerical maps to the check status.
    pub fn from_core(section: &str, e: Error) -> Self {
        match e {
            Error::InvalidSymbol(_)
            | Error::InvalidGrid(_)
            | Error::Inadmissible(_)
            | Error::InvalidArgument(_)
            | Error::Parse(_) => Self::Config {
                key: section.to_string(),
                msg: e.to_string(),
            },
            Error::Io(_) | Error::Json(_) => Self::Io(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config { key, msg } => write!(f, "invalid config key `{key}`: {msg}"),
            Self::Numerical(msg) => write!(f, "numerical failure: {msg}"),
            Self::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::from_core("<input>", e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
