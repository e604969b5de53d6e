//! Root-raised-cosine pulse shaping.
//!
//! Two realizations: a truncated FIR for linear (aperiodic) convolution and
//! an exact frequency-domain response for block-periodic signals. Both are
//! normalized to unit energy, so RRC followed by the matched RRC samples
//! the transmitted symbols with unit gain.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{bin_frequency, FftPair};

/// Default FIR span in symbols.
pub const DEFAULT_SPAN_SYMBOLS: usize = 256;

/// Continuous RRC impulse response at `t` symbol periods (peak `1 + beta(4/pi - 1)`).
pub fn rrc_impulse(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 + beta * (4.0 / PI - 1.0);
    }
    let edge = 1.0 / (4.0 * beta);
    if (t.abs() - edge).abs() < 1e-9 {
        return beta / 2f64.sqrt()
            * ((1.0 + 2.0 / PI) * (PI / (4.0 * beta)).sin() + (1.0 - 2.0 / PI) * (PI / (4.0 * beta)).cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}

/// Unit-energy taps covering `span_symbols` symbol periods (odd length).
pub fn rrc_taps(rolloff: f64, sps: usize, span_symbols: usize) -> Vec<f64> {
    let half = span_symbols * sps / 2;
    let mut taps: Vec<f64> =
        (0..=2 * half).map(|i| rrc_impulse((i as f64 - half as f64) / sps as f64, rolloff)).collect();
    let energy: f64 = taps.iter().map(|h| h * h).sum();
    let s = energy.sqrt();
    taps.iter_mut().for_each(|h| *h /= s);
    taps
}

/// FIR pulse shaper and matched filter.
#[derive(Debug, Clone)]
pub struct RrcFilter {
    taps: Vec<f64>,
    sps: usize,
}

impl RrcFilter {
    pub fn new(rolloff: f64, sps: usize, span_symbols: usize) -> Self {
        assert!(rolloff > 0.0 && rolloff <= 1.0, "rolloff must lie in (0, 1]");
        assert!(sps >= 1);
        Self { taps: rrc_taps(rolloff, sps, span_symbols), sps }
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Group delay in samples.
    pub fn delay(&self) -> usize {
        self.taps.len() / 2
    }

    fn convolve(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); x.len() + self.taps.len() - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == Complex64::default() {
                continue;
            }
            for (j, &h) in self.taps.iter().enumerate() {
                out[i + j] += xi * h;
            }
        }
        out
    }

    /// Upsamples by `sps` and convolves; output has `len*sps + taps - 1` samples.
    pub fn shape(&self, symbols: &[Complex64]) -> Vec<Complex64> {
        let mut up = vec![Complex64::default(); symbols.len() * self.sps];
        for (i, &s) in symbols.iter().enumerate() {
            up[i * self.sps] = s;
        }
        self.convolve(&up)
    }

    /// Matched filtering of a shaped waveform followed by symbol-time
    /// sampling, compensating both filter delays.
    pub fn matched_sample(&self, waveform: &[Complex64], num_symbols: usize) -> Vec<Complex64> {
        let y = self.convolve(waveform);
        let d = 2 * self.delay();
        (0..num_symbols).map(|k| y[d + k * self.sps]).collect()
    }
}

/// Shapes `symbols` by linear convolution with a unit-energy RRC.
pub fn rrc_shape(symbols: &[Complex64], rolloff: f64, sps: usize) -> Vec<Complex64> {
    RrcFilter::new(rolloff, sps, DEFAULT_SPAN_SYMBOLS).shape(symbols)
}

/// Raised-cosine spectrum (unit passband) at `f` in symbol-rate units.
fn raised_cosine(f: f64, beta: f64) -> f64 {
    let f = f.abs();
    let lo = (1.0 - beta) / 2.0;
    let hi = (1.0 + beta) / 2.0;
    if f <= lo {
        1.0
    } else if f >= hi {
        0.0
    } else {
        0.5 * (1.0 + (PI / beta * (f - lo)).cos())
    }
}

/// Real RRC response on `n` DFT bins at `sps` samples per symbol, scaled
/// so the corresponding circular filter has unit energy.
pub fn rrc_response(n: usize, sps: usize, rolloff: f64) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let f = bin_frequency(k, n, sps as f64);
            (sps as f64 * raised_cosine(f, rolloff)).sqrt()
        })
        .collect()
}

/// Circular RRC shaping of a block-periodic symbol sequence.
pub fn shape_periodic(symbols: &[Complex64], rolloff: f64, sps: usize) -> Vec<Complex64> {
    let n = symbols.len() * sps;
    let mut x = vec![Complex64::default(); n];
    for (i, &s) in symbols.iter().enumerate() {
        x[i * sps] = s;
    }
    let mut fft = FftPair::new(n);
    fft.forward(&mut x);
    for (v, h) in x.iter_mut().zip(rrc_response(n, sps, rolloff)) {
        *v *= h;
    }
    fft.inverse(&mut x);
    x
}

/// Band-limited periodic resampling by an integer factor (spectral zero
/// padding). Sample values of the underlying waveform are preserved.
pub fn resample_periodic(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    if factor == 1 {
        return x.to_vec();
    }
    let n = x.len();
    let m = n * factor;
    let mut spec = x.to_vec();
    FftPair::new(n).forward(&mut spec);
    let mut out = vec![Complex64::default(); m];
    let pos = n.div_ceil(2);
    out[..pos].copy_from_slice(&spec[..pos]);
    out[m - (n - pos)..].copy_from_slice(&spec[pos..]);
    if n % 2 == 0 {
        // Split the Nyquist bin symmetrically.
        let nyq = spec[n / 2];
        out[m - n / 2] = nyq * 0.5;
        out[n / 2] = nyq * 0.5;
    }
    for v in out.iter_mut() {
        *v *= factor as f64;
    }
    FftPair::new(m).inverse(&mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qpsk(n: usize, seed: u64) -> Vec<Complex64> {
        let mut s = seed;
        (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = if (s >> 33) & 1 == 0 { 1.0 } else { -1.0 };
                let im = if (s >> 34) & 1 == 0 { 1.0 } else { -1.0 };
                Complex64::new(re, im)
            })
            .collect()
    }

    #[test]
    fn unit_energy_taps() {
        for (beta, sps) in [(0.1, 2), (0.1, 8), (0.5, 4), (1.0, 2)] {
            let e: f64 = rrc_taps(beta, sps, 64).iter().map(|h| h * h).sum();
            assert!((e - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn impulse_gives_taps() {
        let f = RrcFilter::new(0.1, 2, 32);
        let out = f.shape(&[Complex64::new(1.0, 0.0)]);
        assert_eq!(out.len(), 2 + f.taps().len() - 1);
        for (o, h) in out.iter().zip(f.taps()) {
            assert_eq!(o.re, *h);
        }
    }

    #[test]
    fn matched_loopback_isi_floor() {
        let x = qpsk(2000, 1);
        let f = RrcFilter::new(0.1, 2, DEFAULT_SPAN_SYMBOLS);
        let y = f.matched_sample(&f.shape(&x), x.len());
        // Skip the edges, where truncation of the tails matters.
        let (sig, err): (f64, f64) = x[300..1700]
            .iter()
            .zip(&y[300..1700])
            .fold((0.0, 0.0), |(s, e), (a, b)| (s + a.norm_sqr(), e + (a - b).norm_sqr()));
        let snr_db = 10.0 * (sig / err).log10();
        assert!(snr_db >= 40.0, "{snr_db}");
    }

    #[test]
    fn periodic_shaping_is_nyquist() {
        let x = qpsk(512, 3);
        for sps in [2, 8] {
            let w = shape_periodic(&x, 0.1, sps);
            // Matched filtering is the same real response again.
            let n = w.len();
            let mut spec = w.clone();
            let mut fft = FftPair::new(n);
            fft.forward(&mut spec);
            for (v, h) in spec.iter_mut().zip(rrc_response(n, sps, 0.1)) {
                *v *= h;
            }
            fft.inverse(&mut spec);
            for (k, s) in x.iter().enumerate() {
                assert!((spec[k * sps] - s).norm() < 1e-10);
            }
            let e: f64 = rrc_response(n, sps, 0.1).iter().map(|h| h * h).sum::<f64>() / n as f64;
            assert!((e - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn resampling_preserves_samples() {
        let x = shape_periodic(&qpsk(256, 9), 0.1, 2);
        let up = resample_periodic(&x, 4);
        assert_eq!(up.len(), 4 * x.len());
        for (i, v) in x.iter().enumerate() {
            assert!((up[4 * i] - v).norm() < 1e-10);
        }
    }
}
