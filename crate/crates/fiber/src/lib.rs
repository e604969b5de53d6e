//! Single-polarization WDM fiber simulation.
//!
//! Channels are root-raised-cosine shaped at two samples per symbol,
//! resampled onto a common aggregate grid and multiplexed. The aggregate
//! field is propagated span by span with the symmetric split-step Fourier
//! method, amplified by noisy EDFAs, and the center channel is recovered
//! with ideal dispersion compensation, a matched filter and a data-aided
//! scalar equalizer.

pub mod checkpoint;
mod error;
pub mod edfa;
mod fft;
pub mod link;
pub mod receiver;
pub mod rrc;
pub mod sim;
pub mod snr;
pub mod ssfm;
pub mod wdm;

pub use error::{FiberError, Result};
pub use link::{FiberLink, SimGrid, WdmConfig};
pub use sim::{LinkSimulator, NoiseMode, SimOutput};
