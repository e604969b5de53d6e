//! Symmetric split-step Fourier solver of the scalar NLSE
//!
//! `dA/dz = -alpha/2 A - j beta2/2 d^2A/dt^2 + j gamma |A|^2 A`
//!
//! on a periodic time window. `A` is in sqrt(W), `z` in km.

use num_complex::Complex64;

use crate::error::{FiberError, Result};
use crate::fft::{bin_frequency, FftPair};
use crate::link::FiberLink;

/// Parameters of one homogeneous fiber section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpanParams {
    pub length_km: f64,
    /// Power attenuation, 1/km.
    pub alpha: f64,
    /// s^2/km.
    pub beta2: f64,
    /// 1/W/km.
    pub gamma: f64,
}

impl SpanParams {
    pub fn from_link(link: &FiberLink) -> Self {
        Self {
            length_km: link.span_length_km,
            alpha: link.alpha_per_km(),
            beta2: link.beta2_s2_per_km(),
            gamma: link.gamma_per_w_km,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    pub step_km: f64,
    /// Bound on the per-step peak nonlinear phase. Exceeding it is an error
    /// when `abort_on_violation`; otherwise it only shows in the report.
    pub max_nonlinear_phase: f64,
    pub abort_on_violation: bool,
}

impl Default for StepPolicy {
    fn default() -> Self {
        Self { step_km: 1.0, max_nonlinear_phase: 0.05, abort_on_violation: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpanReport {
    pub steps: usize,
    pub max_nonlinear_phase: f64,
}

/// Reusable FFT plans and angular-frequency grid for one record length.
#[derive(Clone)]
pub struct Propagator {
    fft: FftPair,
    omega_sq: Vec<f64>,
}

impl Propagator {
    pub fn new(n: usize, sample_rate_hz: f64) -> Self {
        let omega_sq = (0..n)
            .map(|k| {
                let w = 2.0 * std::f64::consts::PI * bin_frequency(k, n, sample_rate_hz);
                w * w
            })
            .collect();
        Self { fft: FftPair::new(n), omega_sq }
    }

    fn linear_operator(&self, span: &SpanParams, dz: f64) -> Vec<Complex64> {
        let amp = (-0.5 * span.alpha * dz).exp();
        self.omega_sq
            .iter()
            .map(|&w2| Complex64::from_polar(amp, 0.5 * span.beta2 * w2 * dz))
            .collect()
    }

    fn apply_spectral(&mut self, field: &mut [Complex64], op: &[Complex64]) {
        self.fft.forward(field);
        for (v, h) in field.iter_mut().zip(op) {
            *v *= h;
        }
        self.fft.inverse(field);
    }

    /// Lossless dispersion over `beta2_length` s^2 (use the negative total
    /// for compensation).
    pub fn disperse(&mut self, field: &mut [Complex64], beta2_length: f64) {
        let op: Vec<Complex64> =
            self.omega_sq.iter().map(|&w2| Complex64::from_polar(1.0, 0.5 * beta2_length * w2)).collect();
        self.apply_spectral(field, &op);
    }

    /// Propagates `field` through one span in place.
    pub fn span(&mut self, field: &mut [Complex64], span: &SpanParams, policy: &StepPolicy) -> Result<SpanReport> {
        if !(policy.step_km > 0.0) || !(span.length_km > 0.0) {
            return Err(FiberError::InvalidParameter("step and span length must be positive".into()));
        }
        let steps = ((span.length_km / policy.step_km).ceil() as usize).max(1);
        let h = span.length_km / steps as f64;
        let half = self.linear_operator(span, 0.5 * h);
        let full = self.linear_operator(span, h);
        // Nonlinear phase integrated over the step's loss profile, evaluated
        // with the midpoint power.
        let l_eff = if span.alpha > 0.0 { 2.0 * (0.5 * span.alpha * h).sinh() / span.alpha } else { h };
        let mut report = SpanReport { steps, max_nonlinear_phase: 0.0 };

        self.fft.forward(field);
        for (v, op) in field.iter_mut().zip(&half) {
            *v *= op;
        }
        for s in 0..steps {
            self.fft.inverse(field);
            if span.gamma != 0.0 {
                let mut peak = 0.0f64;
                for v in field.iter_mut() {
                    let p = v.norm_sqr();
                    peak = peak.max(p);
                    *v *= Complex64::from_polar(1.0, span.gamma * p * l_eff);
                }
                let phase = span.gamma * peak * l_eff;
                report.max_nonlinear_phase = report.max_nonlinear_phase.max(phase);
            }
            self.fft.forward(field);
            let op = if s + 1 == steps { &half } else { &full };
            for (v, o) in field.iter_mut().zip(op) {
                *v *= o;
            }
        }
        self.fft.inverse(field);

        if report.max_nonlinear_phase > policy.max_nonlinear_phase && policy.abort_on_violation {
            return Err(FiberError::Unstable { phase: report.max_nonlinear_phase, bound: policy.max_nonlinear_phase });
        }
        Ok(report)
    }
}

/// Convenience wrapper building a one-shot propagator.
pub fn ssfm_span(
    field: &mut [Complex64],
    span: &SpanParams,
    sample_rate_hz: f64,
    policy: &StepPolicy,
) -> Result<SpanReport> {
    Propagator::new(field.len(), sample_rate_hz).span(field, span, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdm::mean_power;

    fn pulse_train(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                Complex64::new((-(t - 0.3).powi(2) * 400.0).exp(), 0.5 * (-(t - 0.7).powi(2) * 900.0).exp()) * 0.03
            })
            .collect()
    }

    #[test]
    fn pure_dispersion_is_invertible() {
        let x = pulse_train(4096);
        let mut y = x.clone();
        let span = SpanParams { length_km: 2000.0, alpha: 0.0, beta2: -21.7e-24, gamma: 0.0 };
        let mut prop = Propagator::new(x.len(), 256e9);
        prop.span(&mut y, &span, &StepPolicy::default()).unwrap();
        assert!(y.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>() > 1e-6);
        prop.disperse(&mut y, -span.beta2 * span.length_km);
        let err: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum();
        let sig: f64 = x.iter().map(|a| a.norm_sqr()).sum();
        assert!(10.0 * (err / sig).log10() <= -40.0);
    }

    #[test]
    fn spm_preserves_magnitude() {
        let x = pulse_train(1024);
        let mut y = x.clone();
        let span = SpanParams { length_km: 80.0, alpha: 0.0, beta2: 0.0, gamma: 1.37 };
        ssfm_span(&mut y, &span, 64e9, &StepPolicy { step_km: 0.5, ..Default::default() }).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a.norm() - b.norm()).abs() < 1e-14);
        }
        assert!(x.iter().zip(&y).any(|(a, b)| (a - b).norm() > 1e-6));
    }

    #[test]
    fn attenuation_only() {
        let x = pulse_train(2048);
        let mut y = x.clone();
        let span = SpanParams { length_km: 80.0, alpha: 0.2 * std::f64::consts::LN_10 / 10.0, beta2: 0.0, gamma: 0.0 };
        ssfm_span(&mut y, &span, 64e9, &StepPolicy::default()).unwrap();
        let loss_db = 10.0 * (mean_power(&y) / mean_power(&x)).log10();
        assert!((loss_db + 16.0).abs() < 1e-6, "{loss_db}");
    }

    #[test]
    fn lossless_energy_conservation() {
        let x = pulse_train(2048);
        let mut y = x.clone();
        let span = SpanParams { length_km: 80.0, alpha: 0.0, beta2: -21.7e-24, gamma: 1.37 };
        ssfm_span(&mut y, &span, 256e9, &StepPolicy::default()).unwrap();
        let rel = (mean_power(&y) / mean_power(&x) - 1.0).abs();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn instability_bound() {
        let mut y: Vec<Complex64> = pulse_train(256).iter().map(|v| v * 100.0).collect();
        let span = SpanParams { length_km: 10.0, alpha: 0.0, beta2: 0.0, gamma: 1.37 };
        let policy = StepPolicy { step_km: 5.0, max_nonlinear_phase: 0.05, abort_on_violation: true };
        assert!(matches!(ssfm_span(&mut y, &span, 64e9, &policy), Err(FiberError::Unstable { .. })));
    }
}
