use std::path::PathBuf;

use spectra_theta_core::ErrorKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spectra_theta_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing output: {0}")]
    Stdout(std::io::Error),
    #[error("{}: {source}", path.display())]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Input(String),
    #[error("{count} invariant violation(s) in {what}")]
    Violations { what: String, count: usize },
    #[error("building the worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Violations { .. } => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Domain | ErrorKind::Resource => 3,
                ErrorKind::Numeric => 4,
            },
            CliError::Input(_) | CliError::Json { .. } | CliError::Io { .. } => 3,
            CliError::Stdout(_) | CliError::Pool(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
