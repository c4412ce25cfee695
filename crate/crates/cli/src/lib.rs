//! Support library for the `biphoton` binary: configuration handling and
//! file exporters, split out so integration tests can parse the artifacts
//! the binary writes.

pub mod config;
pub mod io;

/// Errors split by exit code: configuration problems exit 2, numeric
/// failures exit 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<biphoton::Error> for CliError {
    fn from(e: biphoton::Error) -> Self {
        use biphoton::Error::*;
        match e {
            NonPowerOfTwo(_) | NonPositiveSpan(_) | InvalidParameter(_) | BadAxisIndex(_)
            | NegativeFwhm(_) => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
