//! Erbium-doped fiber amplifier with ASE loading.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::link::PLANCK;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edfa {
    pub gain_db: f64,
    /// `None` amplifies without noise.
    pub noise_figure_db: Option<f64>,
}

impl Edfa {
    /// Single-polarization ASE power spectral density in W/Hz,
    /// `(G - 1) h nu n_sp` with `n_sp = NF / 2`.
    pub fn ase_psd(&self, carrier_hz: f64) -> f64 {
        match self.noise_figure_db {
            None => 0.0,
            Some(nf_db) => {
                let g = 10f64.powf(self.gain_db / 10.0);
                let n_sp = 10f64.powf(nf_db / 10.0) / 2.0;
                (g - 1.0) * PLANCK * carrier_hz * n_sp
            }
        }
    }

    /// Amplifies `field` and adds circular complex Gaussian ASE over the
    /// full simulated bandwidth `sample_rate_hz`.
    pub fn apply<R: Rng + ?Sized>(&self, field: &mut [Complex64], sample_rate_hz: f64, carrier_hz: f64, rng: &mut R) {
        let amp = 10f64.powf(self.gain_db / 20.0);
        let sigma = (self.ase_psd(carrier_hz) * sample_rate_hz / 2.0).sqrt();
        for v in field.iter_mut() {
            *v *= amp;
            if sigma > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *v += Complex64::new(re, im) * sigma;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wdm::mean_power;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    const NU: f64 = 193.4e12;

    #[test]
    fn noiseless_is_pure_gain() {
        let mut x = vec![Complex64::new(1e-3, -2e-3); 16];
        let edfa = Edfa { gain_db: 16.0, noise_figure_db: None };
        edfa.apply(&mut x, 256e9, NU, &mut ChaCha20Rng::seed_from_u64(1));
        let g = 10f64.powf(1.6).sqrt();
        assert!(x.iter().all(|v| (v - Complex64::new(1e-3, -2e-3) * g).norm() < 1e-15));
    }

    #[test]
    fn noise_power_matches_psd() {
        let edfa = Edfa { gain_db: 16.0, noise_figure_db: Some(6.0) };
        let mut x = vec![Complex64::default(); 1_000_000];
        edfa.apply(&mut x, 256e9, NU, &mut ChaCha20Rng::seed_from_u64(2));
        let expected = edfa.ase_psd(NU) * 256e9;
        let ratio = mean_power(&x) / expected;
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn seeded_reproducibility() {
        let edfa = Edfa { gain_db: 10.0, noise_figure_db: Some(5.0) };
        let run = |seed| {
            let mut x = vec![Complex64::new(1e-2, 0.0); 1000];
            edfa.apply(&mut x, 64e9, NU, &mut ChaCha20Rng::seed_from_u64(seed));
            x
        };
        assert_eq!(run(9), run(9));
        assert_ne!(run(9), run(10));
    }
}
