//! Probabilistic amplitude shaping building blocks.
//!
//! The crate is organised bottom-up:
//!
//! * [`ccdm`]: exact constant-composition distribution matching by
//!   lexicographic ranking of multiset permutations.
//! * [`edi`]: sliding-window energy statistics and the energy dispersion
//!   index (EDI) of a finite symbol block.
//! * [`design`]: Maxwell-Boltzmann fitting, composition quantization and
//!   rate-loss bookkeeping.
//! * [`lccdm`]: list-encoding CCDM, which picks the lowest-EDI candidate
//!   out of `2^(2v)` pseudo-QAM blocks.
//! * [`framer`]: PAM/QAM assembly from amplitudes and sign bits, labeling
//!   and hard decisions.
//! * [`metrics`]: bit-metric-decoding rates, pre-FEC BER and per-block
//!   statistics export.

pub mod bits;
pub mod ccdm;
pub mod design;
pub mod edi;
mod error;
pub mod framer;
pub mod lccdm;
pub mod metrics;
mod sum;

pub use bits::BitBlock;
pub use ccdm::{AmplitudeBlock, Ccdm, Composition};
pub use edi::EdiValue;
pub use error::{Error, Result};
pub use lccdm::{FlipPosition, Lccdm, LccdmConfig};
