use biased_evidence::{Error, ErrorKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0} verification checks failed")]
    VerificationFailed(usize),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Attach the grid point at which a sweep failed.
    pub fn at_grid(self, point: f64) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("at grid point {point}: {m}")),
            CliError::Numeric(m) => CliError::Numeric(format!("at grid point {point}: {m}")),
            other => other,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e.kind() {
            ErrorKind::Domain => CliError::Input(e.to_string()),
            ErrorKind::Numeric => CliError::Numeric(e.to_string()),
        }
    }
}
