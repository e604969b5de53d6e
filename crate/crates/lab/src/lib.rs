//! Experiment harness: configuration, transmitter chain, sweeps and their
//! CSV artifacts.

pub mod chain;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod presets;
pub mod rates;
pub mod validate;

pub use config::ExperimentSpec;
pub use error::{LabError, Result};
