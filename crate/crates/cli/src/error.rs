use std::path::PathBuf;

/// Process exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitKind {
    Ok = 0,
    ToleranceBreach = 1,
    BadInput = 2,
    SolverFailure = 3,
    NoSolution = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    BadInput(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_kind(&self) -> ExitKind {
        match self {
            CliError::BadInput(_) | CliError::Io { .. } => ExitKind::BadInput,
            CliError::Solver(_) => ExitKind::SolverFailure,
            CliError::NoSolution(_) => ExitKind::NoSolution,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<ispd_core::Error> for CliError {
    fn from(e: ispd_core::Error) -> Self {
        use ispd_core::Error as E;
        match e {
            E::ConvergenceFailure { .. }
            | E::NotPositiveDefinite { .. }
            | E::NoDescent { .. }
            | E::ZeroFunction
            | E::DegenerateGaussMap { .. } => CliError::Solver(e.to_string()),
            _ => CliError::BadInput(e.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
