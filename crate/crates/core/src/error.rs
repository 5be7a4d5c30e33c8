use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("generators are linearly dependent")]
    DependentGenerators,

    #[error("control values do not produce two independent generators")]
    NotControllableWithTwoLevels,

    #[error("internal solver failure: {0}")]
    InternalSolverFailure(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
