use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse transform pair of one length. The inverse is scaled by
/// `1/n` so `inverse(forward(x)) == x`.
#[derive(Clone)]
pub(crate) struct FftPair {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    n: usize,
}

impl FftPair {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self { fwd, inv, scratch: vec![Complex64::default(); len], n }
    }

    pub(crate) fn forward(&mut self, x: &mut [Complex64]) {
        self.fwd.process_with_scratch(x, &mut self.scratch);
    }

    pub(crate) fn inverse(&mut self, x: &mut [Complex64]) {
        self.inv.process_with_scratch(x, &mut self.scratch);
        let s = 1.0 / self.n as f64;
        for v in x.iter_mut() {
            *v *= s;
        }
    }
}

/// Frequency of DFT bin `k` for `n` points at `sample_rate`, in the
/// two-sided convention (upper half negative).
pub(crate) fn bin_frequency(k: usize, n: usize, sample_rate: f64) -> f64 {
    let k = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
    k * sample_rate / n as f64
}
