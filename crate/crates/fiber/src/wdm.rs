//! Channel generation and wavelength multiplexing on the aggregate grid.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FiberError, Result};
use crate::link::{SimGrid, WdmConfig, BAND_GUARD};
use crate::rrc::{resample_periodic, shape_periodic};

pub fn dbm_to_watt(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

pub fn watt_to_dbm(w: f64) -> f64 {
    10.0 * (w / 1e-3).log10()
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    x.iter().map(|s| s.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// Scales `x` in place to average power `watts`.
pub fn set_power(x: &mut [Complex64], watts: f64) {
    let p = mean_power(x);
    if p > 0.0 {
        let s = (watts / p).sqrt();
        x.iter_mut().for_each(|v| *v *= s);
    }
}

/// Baseband waveform of one channel on the aggregate grid: RRC shaping at
/// the per-channel oversampling, then band-limited resampling.
pub fn channel_waveform(symbols: &[Complex64], wdm: &WdmConfig, grid: &SimGrid) -> Vec<Complex64> {
    let sps = grid.channel_samples_per_symbol;
    let shaped = shape_periodic(symbols, wdm.rrc_rolloff, sps);
    resample_periodic(&shaped, grid.aggregate_sps(wdm) / sps)
}

/// Multiplies by `exp(j 2 pi bins i / n)`, an exact circular frequency shift.
pub fn shift_bins(x: &mut [Complex64], bins: i64) {
    let n = x.len() as i64;
    for (i, v) in x.iter_mut().enumerate() {
        let k = (bins * i as i64).rem_euclid(n);
        *v *= Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
    }
}

/// DFT bins per channel spacing for a record of `n` samples at `sample_rate`.
pub fn spacing_bins(wdm: &WdmConfig, n: usize, sample_rate: f64) -> Result<i64> {
    let bins = wdm.spacing_hz() * n as f64 / sample_rate;
    if (bins - bins.round()).abs() > 1e-6 {
        return Err(FiberError::GridTooNarrow(format!("channel spacing is {bins} DFT bins, not an integer")));
    }
    Ok(bins.round() as i64)
}

/// Sums channel waveforms shifted to `m * spacing`,
/// `m = -(N-1)/2 ..= (N-1)/2`, in channel order.
pub fn wdm_mux(channels: &[Vec<Complex64>], wdm: &WdmConfig, sample_rate: f64) -> Result<Vec<Complex64>> {
    if channels.len() != wdm.num_channels {
        return Err(FiberError::LengthMismatch { expected: wdm.num_channels, got: channels.len() });
    }
    let n = channels[0].len();
    if channels.iter().any(|c| c.len() != n) {
        return Err(FiberError::InvalidParameter("channels have different lengths".into()));
    }
    if wdm.num_channels == 1 {
        return Ok(channels[0].clone());
    }
    let band = wdm.num_channels as f64 * wdm.spacing_hz() * BAND_GUARD;
    if sample_rate < band {
        return Err(FiberError::GridTooNarrow(format!(
            "{:.1} GHz grid for a {:.1} GHz guarded band",
            sample_rate / 1e9,
            band / 1e9
        )));
    }
    let step = spacing_bins(wdm, n, sample_rate)?;
    let mut out = vec![Complex64::default(); n];
    for (ch, m) in channels.iter().zip(wdm.channel_offsets()) {
        let mut c = ch.clone();
        shift_bins(&mut c, m * step);
        for (o, v) in out.iter_mut().zip(c) {
            *o += v;
        }
    }
    Ok(out)
}
