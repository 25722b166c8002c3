//! Library surface of the experiment driver, kept callable so integration
//! tests can run the commands in-process.

pub mod commands;
pub mod config;
pub mod report;

use std::process::ExitCode;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    ModelClass(String),
    SizeGuard(String),
    Numerical(String),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::ModelClass(m) => write!(f, "model class error: {m}"),
            CliError::SizeGuard(m) => write!(f, "size guard: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<sacnet::Error> for CliError {
    fn from(e: sacnet::Error) -> Self {
        use sacnet::Error;
        match e {
            Error::SizeGuard { .. } => CliError::SizeGuard(e.to_string()),
            Error::ModelClass(_) => CliError::ModelClass(e.to_string()),
            Error::NonErgodic(_)
            | Error::NonConverged(_)
            | Error::Singular(_)
            | Error::UnreachableLocalPair { .. } => CliError::Numerical(e.to_string()),
            Error::Io(io) => CliError::Io(io),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        let code: u8 = match self {
            CliError::Config(_) => 2,
            CliError::ModelClass(_) => 3,
            CliError::SizeGuard(_) => 4,
            CliError::Numerical(_) => 5,
            CliError::Io(_) => 6,
        };
        ExitCode::from(code)
    }
}
