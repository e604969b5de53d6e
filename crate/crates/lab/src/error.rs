use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical stability abort: {0}")]
    Unstable(String),
    #[error(transparent)]
    Core(#[from] pas_core::Error),
    #[error(transparent)]
    Fiber(pas_fiber::FiberError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<pas_fiber::FiberError> for LabError {
    fn from(e: pas_fiber::FiberError) -> Self {
        match e {
            pas_fiber::FiberError::Unstable { .. } => LabError::Unstable(e.to_string()),
            other => LabError::Fiber(other),
        }
    }
}

impl LabError {
    /// Process exit status: 2 for configuration problems, 3 for a
    /// stability abort, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            LabError::Unstable(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
