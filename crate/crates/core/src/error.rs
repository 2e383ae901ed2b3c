use thiserror::Error;

/// Everything that can go wrong inside the solver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-physical state at cell {cell:?}: {reason}")]
    NonPhysicalState { cell: Option<(isize, isize)>, reason: String },

    #[error("moment matrix is not positive definite: {0}")]
    SingularMomentMatrix(String),

    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("degenerate characteristic stencil: {0}")]
    DegenerateStencil(String),

    #[error("viscous problem needs initial time derivatives")]
    MissingInitialDerivatives,

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn non_physical(reason: impl Into<String>) -> Self {
        Error::NonPhysicalState { cell: None, reason: reason.into() }
    }

    /// Attach a cell index to a non-physical state error.
    pub fn at_cell(self, i: isize, j: isize) -> Self {
        match self {
            Error::NonPhysicalState { reason, .. } => Error::NonPhysicalState { cell: Some((i, j)), reason },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
