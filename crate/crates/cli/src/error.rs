use std::process::ExitCode;

use superlog_ckn::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 3 for numerical-tolerance failures, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Tolerance(_)
            | CliError::Core(Error::Depth { .. } | Error::Quadrature { .. } | Error::Indeterminate(_)) => 3,
            _ => 2,
        }
    }
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// An inequality or bound failed: a finding, not a crash.
    Violation,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Pass => ExitCode::SUCCESS,
            Outcome::Violation => ExitCode::from(1),
        }
    }
}
