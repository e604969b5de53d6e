use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("rank out of range for a codebook of {codebook_bits} bits")]
    RankOutOfRange { codebook_bits: u64 },
    #[error("sequence does not match the configured composition")]
    CompositionMismatch,
    #[error("input length {k} exceeds the codebook capacity of {max} bits")]
    InputTooLong { k: usize, max: usize },
    #[error("decoded rank does not fit in {k} bits")]
    UnreachableCodeword { k: usize },
    #[error("window length {0} must be even")]
    OddWindow(usize),
    #[error("window length {window} too large for block length {n}")]
    WindowTooLarge { window: usize, n: usize },
    #[error("block of length {n} leaves fewer than two windows for W = {window}")]
    DegenerateWindow { window: usize, n: usize },
    #[error("signal has zero energy")]
    ZeroEnergy,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty input")]
    Empty,
    #[error("{0} out of range")]
    OutOfRange(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
}
