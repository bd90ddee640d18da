use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] helmrecon_core::Error),

    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 configuration, 3 solver, 4 coverage, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use helmrecon_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Coverage { .. }) => 4,
            CliError::Core(E::Solver(_) | E::Geometry(_)) => 3,
            CliError::Core(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
