use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {}: {source}", path.display())]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid configuration: {0}")]
    Model(#[source] twinbarrier::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("solver failure: {0}")]
    Solver(#[from] twinbarrier::Error),
    #[error("oracle failure: {0}")]
    Oracle(#[from] twinbarrier_fdfd::FdfdError),
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for anything the operator can fix in the inputs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(_) | CliError::Oracle(_) => 1,
            _ => 2,
        }
    }
}
