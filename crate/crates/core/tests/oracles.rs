use num_complex::Complex64;
use pas_core::ccdm::Ccdm;
use pas_core::design::design_shaper;
use pas_core::edi::edi_of_energies;
use pas_core::framer::{frame_qam, hard_demap, label_bits, normalization_scale, uniform_scale, PamLabeling, SignSource};
use pas_core::lccdm::random_bits;
use pas_core::metrics::{air_bmd, noise_variance_1d, pre_fec_ber, Pam1dModel};
use pas_core::{AmplitudeBlock, Composition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Uniform PAM symbols on both quadratures, unit energy.
fn uniform_qam(lab: &PamLabeling, n: usize, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    let levels = lab.levels();
    let s = uniform_scale(lab);
    (0..n)
        .map(|_| {
            let i = levels[rng.random_range(0..levels.len())];
            let q = levels[rng.random_range(0..levels.len())];
            Complex64::new(i as f64, q as f64) * s
        })
        .collect()
}

fn awgn(x: &[Complex64], var_1d: f64, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    let d = Normal::new(0.0, var_1d.sqrt()).unwrap();
    x.iter().map(|v| v + Complex64::new(d.sample(rng), d.sample(rng))).collect()
}

fn split(x: &[Complex64]) -> Vec<f64> {
    x.iter().flat_map(|v| [v.re, v.im]).collect()
}

/// Bitwise GMI of uniform BRGC PAM over a real AWGN channel by trapezoidal
/// integration, per real dimension.
fn gmi_oracle(lab: &PamLabeling, scale: f64, var: f64) -> f64 {
    let levels: Vec<f64> = lab.levels().iter().map(|&l| l as f64 * scale).collect();
    let labels: Vec<u32> = lab.levels().iter().map(|&l| lab.label(l)).collect();
    let m = lab.bits_per_symbol();
    let pdf = |y: f64, x: f64| (-(y - x).powi(2) / (2.0 * var)).exp();
    let span = levels[levels.len() - 1] + 12.0 * var.sqrt();
    let steps = 40_000;
    let h = 2.0 * span / steps as f64;
    let mut gmi = 0.0;
    for bit in 0..m {
        let shift = m - 1 - bit;
        for b in 0..2u32 {
            let mut integral = 0.0;
            for s in 0..=steps {
                let y = -span + s as f64 * h;
                let all: f64 = levels.iter().map(|&x| pdf(y, x)).sum();
                let same: f64 = levels.iter().zip(&labels).filter(|(_, &l)| (l >> shift) & 1 == b).map(|(&x, _)| pdf(y, x)).sum();
                let f = if same > 0.0 { same * (2.0 * same / all).log2() } else { 0.0 };
                let w = if s == 0 || s == steps { 0.5 } else { 1.0 };
                integral += w * f;
            }
            let norm = (2.0 * std::f64::consts::PI * var).sqrt() * levels.len() as f64;
            gmi += integral * h / norm;
        }
    }
    gmi
}

#[test]
fn air_matches_integrated_gmi_for_uniform_16qam() {
    let lab = PamLabeling::new(2);
    let scale = uniform_scale(&lab);
    let model = Pam1dModel::uniform(&lab, scale);
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    for snr_db in [10.0, 15.0, 20.0] {
        let x = uniform_qam(&lab, 200_000, &mut rng);
        let var = noise_variance_1d(snr_db, 1.0);
        let y = awgn(&x, var, &mut rng);
        let air = air_bmd(&split(&x), &split(&y), &model, 0.0, var).unwrap();
        let oracle = 4.0 * gmi_oracle(&lab, scale, var);
        assert!((air - oracle).abs() < 0.02, "{snr_db} dB: {air} vs {oracle}");
    }
}

#[test]
fn noiseless_uniform_256qam_reaches_sixteen_bits() {
    let lab = PamLabeling::new(4);
    let scale = uniform_scale(&lab);
    let model = Pam1dModel::uniform(&lab, scale);
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let x = split(&uniform_qam(&lab, 5000, &mut rng));
    let air = air_bmd(&x, &x, &model, 0.0, 1e-9).unwrap();
    assert!((air - 16.0).abs() < 1e-9, "{air}");
}

#[test]
fn rate_loss_is_subtracted_exactly() {
    let c = Composition::new(vec![1, 3, 5, 7], vec![20, 15, 10, 5]).unwrap();
    let lab = PamLabeling::new(4);
    let model = Pam1dModel::shaped(&c, &lab, 1.0);
    let x: Vec<f64> = vec![1.0, -3.0, 5.0, -7.0];
    let air = air_bmd(&x, &x, &model, 0.125, 1e-9).unwrap();
    assert!((air - (4.0 * model.entropy_bits() - 0.5)).abs() < 1e-12);
    assert!((model.entropy_bits() - (c.entropy_bits() + 1.0)).abs() < 1e-12);
}

/// Exact bit error rate of uniform BRGC PAM with nearest-level decisions.
fn ber_oracle(lab: &PamLabeling, scale: f64, sigma: f64) -> f64 {
    let levels = lab.levels();
    let m = lab.bits_per_symbol() as f64;
    let mut total = 0.0;
    for &tx in &levels {
        for &rx in &levels {
            if rx == tx {
                continue;
            }
            let lo = if rx == levels[0] { f64::NEG_INFINITY } else { (rx - 1) as f64 * scale };
            let hi = if rx == *levels.last().unwrap() { f64::INFINITY } else { (rx + 1) as f64 * scale };
            let t = tx as f64 * scale;
            let p = q_function((lo - t) / sigma) - q_function((hi - t) / sigma);
            total += p * (lab.label(tx) ^ lab.label(rx)).count_ones() as f64;
        }
    }
    total / (levels.len() as f64 * m)
}

#[test]
fn ber_matches_q_function_oracle_for_16pam() {
    let lab = PamLabeling::new(4);
    let scale = uniform_scale(&lab);
    let mut rng = ChaCha20Rng::seed_from_u64(77);
    for snr_db in [18.0, 22.0] {
        let x = uniform_qam(&lab, 100_000, &mut rng);
        let var = noise_variance_1d(snr_db, 1.0);
        let y = awgn(&x, var, &mut rng);
        let tx = label_bits(&x, scale, &lab);
        let rx = hard_demap(&y, scale, &lab).bits;
        let ber = pre_fec_ber(tx.as_slice(), rx.as_slice()).unwrap();
        // Errors are correlated within a symbol, so the spread is taken
        // from per-symbol error counts rather than a binomial model.
        let per_symbol: Vec<f64> = tx
            .as_slice()
            .chunks(8)
            .zip(rx.as_slice().chunks(8))
            .map(|(a, b)| a.iter().zip(b).filter(|(u, v)| u != v).count() as f64 / 8.0)
            .collect();
        let n = per_symbol.len() as f64;
        let mean = per_symbol.iter().sum::<f64>() / n;
        let var_s = per_symbol.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sigma = (var_s / n).sqrt();
        let oracle = ber_oracle(&lab, scale, var.sqrt());
        assert!((ber - oracle).abs() <= 3.0 * sigma, "{snr_db} dB: {ber} vs {oracle} (sigma {sigma})");
    }
    assert_eq!(pre_fec_ber(&[0, 1, 1], &[0, 1, 1]).unwrap(), 0.0);
    assert_eq!(pre_fec_ber(&[0, 1, 1], &[1, 0, 0]).unwrap(), 1.0);
}

#[test]
fn edi_converges_to_energy_variance_ratio() {
    // i.i.d. symbols: Var(G)/E[G] = Var(|X|^2)/E|X|^2 for any window.
    let lab = PamLabeling::new(3);
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let x = uniform_qam(&lab, 4_000_000, &mut rng);
    let e: Vec<f64> = x.iter().map(|v| v.norm_sqr()).collect();
    let levels: Vec<f64> = lab.levels().iter().map(|&l| l as f64 * uniform_scale(&lab)).collect();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for a in &levels {
        for b in &levels {
            let p = a * a + b * b;
            m1 += p;
            m2 += p * p;
        }
    }
    let k = (levels.len() * levels.len()) as f64;
    let (m1, m2) = (m1 / k, m2 / k);
    let oracle = (m2 - m1 * m1) / m1;
    let est = edi_of_energies(&e, 10).unwrap().linear;
    assert!((est / oracle - 1.0).abs() < 0.01, "{est} vs {oracle}");
}

#[test]
fn framed_shaped_blocks_have_unit_energy() {
    let design = design_shaper(&Composition::odd_alphabet(8), 2.4, 1800, 0).unwrap();
    let ccdm = Ccdm::with_input_length(design.composition.clone(), design.rate.k).unwrap();
    let scale = normalization_scale(&design.composition);
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let signs = SignSource::new(3);
    for b in 0..4u64 {
        let a_i: AmplitudeBlock = ccdm.encode(&random_bits(&mut rng, design.rate.k)).unwrap();
        let a_q = ccdm.encode(&random_bits(&mut rng, design.rate.k)).unwrap();
        let q = frame_qam(&a_i, &a_q, &signs.bits(2 * b, 1800), &signs.bits(2 * b + 1, 1800), scale).unwrap();
        let p = q.symbols.iter().map(|v| v.norm_sqr()).sum::<f64>() / q.len() as f64;
        assert!((p - 1.0).abs() < 0.01, "{p}");
    }
}
