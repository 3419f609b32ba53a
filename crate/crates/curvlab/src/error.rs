use std::fmt;

/// Failure of a subcommand, mapped onto the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags, config values or parameters outside an operation's domain.
    #[error("{0}")]
    Validation(String),
    /// The computation itself failed (accuracy, stability, positivity).
    #[error("{0}")]
    Numerical(String),
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    /// `verify` ran and at least one criterion failed.
    #[error("{failed} of {total} criteria failed")]
    CriteriaFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Validation(_) => ExitStatus::Validation,
            CliError::Numerical(_) => ExitStatus::Numerical,
            CliError::Io { .. } | CliError::CriteriaFailed { .. } => ExitStatus::Failure,
        }
    }

    /// Prefix a message with where it happened, keeping the class.
    pub fn context(self, what: impl fmt::Display) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{what}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{what}: {m}")),
            other => other,
        }
    }
}

impl From<curvlab_core::Error> for CliError {
    fn from(e: curvlab_core::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    /// IO trouble or failed acceptance criteria.
    Failure = 1,
    Validation = 2,
    Numerical = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}
