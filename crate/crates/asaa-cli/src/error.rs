use asaa_core::sim::UnknownParadigm;

/// Failure classes of the command line front-end. Each maps to a fixed
/// process exit code so batch scripts can branch on the cause.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Scenario schema or invariant violations, bad override paths.
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    UnknownParadigm(UnknownParadigm),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) | CliError::Csv(_) => 3,
            CliError::Internal(_) => 4,
            CliError::UnknownParadigm(_) => 5,
        }
    }
}

impl From<UnknownParadigm> for CliError {
    fn from(e: UnknownParadigm) -> Self {
        CliError::UnknownParadigm(e)
    }
}
