//! Effective SNR after data-aided scalar equalization.

use num_complex::Complex64;

use crate::error::{FiberError, Result};

/// Reported in place of an infinite SNR.
pub const SNR_CAP_DB: f64 = 99.0;

/// Least-squares scalar `h` minimizing `|y - h x|^2`.
pub fn scalar_ls(x: &[Complex64], y: &[Complex64]) -> Result<Complex64> {
    if x.len() != y.len() {
        return Err(FiberError::LengthMismatch { expected: x.len(), got: y.len() });
    }
    let num: Complex64 = x.iter().zip(y).map(|(a, b)| a.conj() * b).sum();
    let den: f64 = x.iter().map(|a| a.norm_sqr()).sum();
    if den <= 0.0 {
        return Err(FiberError::ZeroEnergy);
    }
    Ok(num / den)
}

/// `E|h x|^2 / E|y - h x|^2` in dB, capped at [`SNR_CAP_DB`].
pub fn effective_snr_db(x: &[Complex64], y: &[Complex64]) -> Result<f64> {
    let h = scalar_ls(x, y)?;
    let sig: f64 = x.iter().map(|a| (h * a).norm_sqr()).sum();
    let err: f64 = x.iter().zip(y).map(|(a, b)| (b - h * a).norm_sqr()).sum();
    if err <= 0.0 || sig / err >= 10f64.powf(SNR_CAP_DB / 10.0) {
        return Ok(SNR_CAP_DB);
    }
    Ok(10.0 * (sig / err).log10())
}

/// Effective SNR per consecutive block of `block_len` symbols, each with
/// its own scalar fit.
pub fn per_block_snr_db(x: &[Complex64], y: &[Complex64], block_len: usize) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(FiberError::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if block_len == 0 || x.len() % block_len != 0 {
        return Err(FiberError::InvalidParameter(format!(
            "{} symbols do not split into blocks of {block_len}",
            x.len()
        )));
    }
    x.chunks(block_len).zip(y.chunks(block_len)).map(|(a, b)| effective_snr_db(a, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;
    use rand_distr::StandardNormal;

    fn qam16(n: usize, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
        let lv = [-3.0, -1.0, 1.0, 3.0];
        (0..n).map(|_| Complex64::new(lv[rng.random_range(0..4)], lv[rng.random_range(0..4)])).collect()
    }

    #[test]
    fn identity_is_capped() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let x = qam16(100, &mut rng);
        assert_eq!(effective_snr_db(&x, &x).unwrap(), SNR_CAP_DB);
    }

    #[test]
    fn scaling_and_rotation_absorbed() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let x = qam16(5000, &mut rng);
        let y: Vec<Complex64> =
            x.iter().map(|v| v + Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * 0.3).collect();
        let base = effective_snr_db(&x, &y).unwrap();
        let rot = Complex64::from_polar(2.0, 0.9);
        let y2: Vec<Complex64> = y.iter().map(|v| v * rot).collect();
        assert!((effective_snr_db(&x, &y2).unwrap() - base).abs() < 1e-9);
    }

    #[test]
    fn known_noise_level() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let x = qam16(100_000, &mut rng);
        // E|x|^2 = 10; noise variance 0.1 per complex sample -> 20 dB.
        let s = (0.05f64).sqrt();
        let y: Vec<Complex64> =
            x.iter().map(|v| v + Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * s).collect();
        let snr = effective_snr_db(&x, &y).unwrap();
        assert!((snr - 20.0).abs() < 0.1, "{snr}");
    }

    #[test]
    fn blocks_and_errors() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let x = qam16(60, &mut rng);
        assert_eq!(per_block_snr_db(&x, &x, 20).unwrap().len(), 3);
        assert!(per_block_snr_db(&x, &x, 7).is_err());
        assert!(matches!(effective_snr_db(&[Complex64::default(); 3], &x[..3]), Err(FiberError::ZeroEnergy)));
    }
}
