use thiserror::Error;

pub type Result<T, E = FiberError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FiberError {
    #[error("invalid link parameter: {0}")]
    InvalidParameter(String),
    #[error("simulation grid too narrow: {0}")]
    GridTooNarrow(String),
    #[error("channel index {index} out of range for {channels} channels")]
    UnknownChannel { index: usize, channels: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("reference signal has zero energy")]
    ZeroEnergy,
    #[error("nonlinear phase {phase:.4} rad per step exceeds the bound {bound:.4} rad")]
    Unstable { phase: f64, bound: f64 },
    #[error("bad waveform file: {0}")]
    BadCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
