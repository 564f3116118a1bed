use std::fmt;
use std::process::ExitCode;

use netsync_core::Error;

/// Process exit status categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Checks ran but at least one failed, or an unexpected numerical failure.
    Failure = 1,
    Config = 2,
    BlowUp = 3,
    NoCycle = 4,
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Config,
            message: message.into(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Self {
            exit: Exit::Failure,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::failure(format!("{}: {err}", path.display()))
    }

    pub fn code(&self) -> ExitCode {
        ExitCode::from(self.exit as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match &e {
            Error::BlowUp { .. } => Exit::BlowUp,
            Error::NoPeriod(_) | Error::DegenerateNode { .. } => Exit::NoCycle,
            Error::EigenNoConvergence { .. }
            | Error::NewtonNoConvergence { .. }
            | Error::SingularJacobian { .. } => Exit::Failure,
            _ => Exit::Config,
        };
        Self {
            exit,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
