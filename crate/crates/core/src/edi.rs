//! Energy dispersion index of finite symbol blocks.
//!
//! For a block `x` of length `n` and an even window `W`, the windowed
//! energies are `g_i = sum_{j=i-W/2}^{i+W/2} |x_j|^2` for the `n - W`
//! fully covered positions. The index is the unbiased sample variance of
//! `g` divided by its sample mean.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::{compensated_sum, CompensatedSum};

/// Windowed energies of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedEnergy {
    pub values: Vec<f64>,
    pub window: usize,
}

/// Linear EDI with a dB view. A zero index maps to `-inf` dB.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EdiValue {
    pub linear: f64,
}

impl EdiValue {
    pub fn db(&self) -> f64 {
        if self.linear > 0.0 {
            10.0 * self.linear.log10()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// EDI of the same block scaled by `sqrt(factor)` in amplitude.
    pub fn scaled(&self, energy_factor: f64) -> EdiValue {
        EdiValue { linear: self.linear * energy_factor }
    }
}

/// Window length used when none is configured.
pub fn default_window(n: usize) -> usize {
    if n >= 600 {
        100
    } else {
        10
    }
}

fn check_window(window: usize, n: usize) -> Result<()> {
    if window % 2 != 0 {
        return Err(Error::OddWindow(window));
    }
    if window == 0 || window >= n {
        return Err(Error::WindowTooLarge { window, n });
    }
    Ok(())
}

/// Streaming window-sum over symbol energies.
///
/// Pushes energies one at a time and yields a window sum once `W + 1`
/// energies are buffered. The running sum is kept as a compensated pair,
/// so values track a fresh summation of the window to rounding level.
#[derive(Debug, Clone)]
pub struct WindowAccumulator {
    window: usize,
    buf: std::collections::VecDeque<f64>,
    hi: f64,
    lo: f64,
}

impl WindowAccumulator {
    pub fn new(window: usize) -> Result<Self> {
        if window % 2 != 0 {
            return Err(Error::OddWindow(window));
        }
        Ok(Self { window, buf: std::collections::VecDeque::with_capacity(window + 2), hi: 0.0, lo: 0.0 })
    }

    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.hi + x;
        let bp = t - self.hi;
        let err = (self.hi - (t - bp)) + (x - bp);
        self.hi = t;
        self.lo += err;
    }

    /// Pushes one energy, returning the completed window sum if any.
    pub fn push(&mut self, energy: f64) -> Option<f64> {
        self.add(energy);
        self.buf.push_back(energy);
        if self.buf.len() > self.window + 1 {
            let old = self.buf.pop_front().expect("non-empty");
            self.add(-old);
        }
        (self.buf.len() == self.window + 1).then_some(self.hi + self.lo)
    }
}

pub fn windowed_energies(x: &[Complex64], window: usize) -> Result<WindowedEnergy> {
    let energies: Vec<f64> = x.iter().map(|s| s.norm_sqr()).collect();
    windowed_energies_of(&energies, window)
}

/// Same as [`windowed_energies`] from precomputed symbol energies.
pub fn windowed_energies_of(energies: &[f64], window: usize) -> Result<WindowedEnergy> {
    check_window(window, energies.len())?;
    let mut acc = WindowAccumulator::new(window)?;
    let values = energies.iter().filter_map(|&e| acc.push(e)).collect();
    Ok(WindowedEnergy { values, window })
}

pub fn edi_estimate(x: &[Complex64], window: usize) -> Result<EdiValue> {
    let energies: Vec<f64> = x.iter().map(|s| s.norm_sqr()).collect();
    edi_of_energies(&energies, window)
}

pub fn edi_of_energies(energies: &[f64], window: usize) -> Result<EdiValue> {
    let n = energies.len();
    check_window(window, n)?;
    if n - window < 2 {
        return Err(Error::DegenerateWindow { window, n });
    }
    let g = windowed_energies_of(energies, window)?.values;
    let count = g.len() as f64;
    let mean = compensated_sum(g.iter().copied()) / count;
    if mean <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let mut ss = CompensatedSum::new();
    for &v in &g {
        let d = v - mean;
        ss.add(d * d);
    }
    let var = ss.value() / (count - 1.0);
    Ok(EdiValue { linear: var / mean })
}

/// Exact EDI for integer symbol energies, as on an unscaled odd-integer
/// amplitude grid. Sums are carried in 128-bit integers and only the final
/// ratio is rounded.
pub fn edi_of_integer_energies(energies: &[u32], window: usize) -> Result<EdiValue> {
    let n = energies.len();
    check_window(window, n)?;
    if n - window < 2 {
        return Err(Error::DegenerateWindow { window, n });
    }
    let mut g: i128 = energies[..=window].iter().map(|&e| e as i128).sum();
    let mut s1 = g;
    let mut s2 = g * g;
    for i in window + 1..n {
        g += energies[i] as i128 - energies[i - window - 1] as i128;
        s1 += g;
        s2 += g * g;
    }
    if s1 == 0 {
        return Err(Error::ZeroEnergy);
    }
    let count = (n - window) as i128;
    // var/mean = (count*s2 - s1^2) / ((count - 1) * s1)
    let num = count * s2 - s1 * s1;
    let den = (count - 1) * s1;
    Ok(EdiValue { linear: num as f64 / den as f64 })
}

/// Mean of per-block linear EDI, reported in dB.
pub fn mean_edi_db<B: AsRef<[Complex64]>>(blocks: &[B], window: usize) -> Result<f64> {
    if blocks.is_empty() {
        return Err(Error::Empty);
    }
    let n = blocks[0].as_ref().len();
    let mut acc = CompensatedSum::new();
    for b in blocks {
        let b = b.as_ref();
        if b.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: b.len() });
        }
        acc.add(edi_estimate(b, window)?.linear);
    }
    Ok(EdiValue { linear: acc.value() / blocks.len() as f64 }.db())
}

/// Mean of linear values in dB.
pub fn mean_linear_db<I: IntoIterator<Item = EdiValue>>(values: I) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    let mut count = 0usize;
    for v in values {
        acc.add(v.linear);
        count += 1;
    }
    if count == 0 {
        return Err(Error::Empty);
    }
    Ok(EdiValue { linear: acc.value() / count as f64 }.db())
}
