//! Coherent receiver for one WDM channel.

use num_complex::Complex64;

use crate::error::{FiberError, Result};
use crate::fft::{bin_frequency, FftPair};
use crate::link::{FiberLink, SimGrid, WdmConfig};
use crate::rrc::rrc_response;
use crate::snr::scalar_ls;
use crate::wdm::spacing_bins;

/// Symbol-rate samples of the channel of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedChannel {
    /// After CDC, matched filter and sampling.
    pub raw: Vec<Complex64>,
    /// `raw / h`.
    pub equalized: Vec<Complex64>,
    pub h: Complex64,
}

/// Front end with ideal, parameter-known dispersion compensation.
pub struct Receiver {
    wdm: WdmConfig,
    sps: usize,
    sample_rate: f64,
    fft: FftPair,
    /// CDC times matched RRC, per DFT bin.
    filter: Vec<Complex64>,
}

impl Receiver {
    /// `accumulated_beta2_length` is the link's total `beta2 L` in s^2.
    pub fn new(wdm: &WdmConfig, grid: &SimGrid, accumulated_beta2_length: f64) -> Self {
        let sps = grid.aggregate_sps(wdm);
        let n = grid.num_samples(wdm);
        let sample_rate = grid.sample_rate_hz(wdm);
        let rrc = rrc_response(n, sps, wdm.rrc_rolloff);
        let filter = (0..n)
            .map(|k| {
                let w = 2.0 * std::f64::consts::PI * bin_frequency(k, n, sample_rate);
                Complex64::from_polar(rrc[k], -0.5 * accumulated_beta2_length * w * w)
            })
            .collect();
        Self { wdm: wdm.clone(), sps, sample_rate, fft: FftPair::new(n), filter }
    }

    pub fn for_link(link: &FiberLink, wdm: &WdmConfig, grid: &SimGrid) -> Self {
        Self::new(wdm, grid, link.beta2_s2_per_km() * link.total_length_km())
    }

    /// Downconverts channel `index` (0-based, center = `N_ch / 2`), applies
    /// CDC and the matched filter, and samples at symbol times.
    pub fn front_end(&mut self, aggregate: &[Complex64], index: usize) -> Result<Vec<Complex64>> {
        if index >= self.wdm.num_channels {
            return Err(FiberError::UnknownChannel { index, channels: self.wdm.num_channels });
        }
        let n = self.filter.len();
        if aggregate.len() != n {
            return Err(FiberError::LengthMismatch { expected: n, got: aggregate.len() });
        }
        let offset = index as i64 - self.wdm.center_index() as i64;
        let shift = if offset == 0 { 0 } else { offset * spacing_bins(&self.wdm, n, self.sample_rate)? };
        let mut spec = aggregate.to_vec();
        self.fft.forward(&mut spec);
        let mut base = vec![Complex64::default(); n];
        for (k, b) in base.iter_mut().enumerate() {
            let src = (k as i64 + shift).rem_euclid(n as i64) as usize;
            *b = spec[src] * self.filter[k];
        }
        self.fft.inverse(&mut base);
        Ok(base.iter().step_by(self.sps).copied().collect())
    }

    /// Front end followed by a data-aided scalar equalizer against `tx`.
    pub fn receive(&mut self, aggregate: &[Complex64], index: usize, tx: &[Complex64]) -> Result<ReceivedChannel> {
        let raw = self.front_end(aggregate, index)?;
        let h = scalar_ls(tx, &raw)?;
        let equalized = raw.iter().map(|v| v / h).collect();
        Ok(ReceivedChannel { raw, equalized, h })
    }
}

pub fn receiver_front_end(
    aggregate: &[Complex64],
    index: usize,
    link: &FiberLink,
    wdm: &WdmConfig,
    grid: &SimGrid,
    tx: &[Complex64],
) -> Result<ReceivedChannel> {
    Receiver::for_link(link, wdm, grid).receive(aggregate, index, tx)
}
