//! Maxwell-Boltzmann fitting, composition quantization and rate loss.

use crate::ccdm::{multiset_count, Composition};
use crate::error::{Error, Result};

pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&q| q > 0.0).map(|&q| q * q.log2()).sum::<f64>()
}

/// Amplitude distribution over an alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeDistribution {
    pub alphabet: Vec<u32>,
    pub probabilities: Vec<f64>,
}

impl AmplitudeDistribution {
    pub fn new(alphabet: Vec<u32>, probabilities: Vec<f64>) -> Result<Self> {
        if alphabet.len() != probabilities.len() || alphabet.is_empty() {
            return Err(Error::InvalidConfig("distribution/alphabet size mismatch".into()));
        }
        if probabilities.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidConfig("negative probability".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!("probabilities sum to {total}")));
        }
        Ok(Self { alphabet, probabilities })
    }

    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probabilities)
    }
}

/// `P(a) ∝ exp(-lambda a^2)`.
pub fn mb_distribution(lambda: f64, alphabet: &[u32]) -> AmplitudeDistribution {
    assert!(!alphabet.is_empty(), "alphabet must be non-empty");
    // Shift the exponent by the smallest energy so lambda -> inf stays finite.
    let min_sq = alphabet.iter().map(|&a| (a as f64).powi(2)).fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = alphabet.iter().map(|&a| (-lambda * ((a as f64).powi(2) - min_sq)).exp()).collect();
    let z: f64 = w.iter().sum();
    AmplitudeDistribution { alphabet: alphabet.to_vec(), probabilities: w.iter().map(|x| x / z).collect() }
}

/// Bisection for the MB parameter reaching `target` bits of entropy.
pub fn solve_lambda_for_entropy(target: f64, alphabet: &[u32]) -> Result<f64> {
    let max = (alphabet.len() as f64).log2();
    if alphabet.is_empty() || !(target > 0.0) || target > max + 1e-12 {
        return Err(Error::OutOfRange("target entropy"));
    }
    if target >= max - 1e-12 {
        return Ok(0.0);
    }
    let h = |l: f64| mb_distribution(l, alphabet).entropy_bits();
    let mut lo = 0.0;
    let mut hi = 1e-3;
    while h(hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::OutOfRange("target entropy"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (h(mid) - target).abs() <= 1e-12 || hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest-remainder quantization of `n P(a)`; ties go to the smaller
/// amplitude.
pub fn composition_from_distribution(p: &AmplitudeDistribution, n: usize) -> Result<Composition> {
    let scaled: Vec<f64> = p.probabilities.iter().map(|&q| q * n as f64).collect();
    let mut counts: Vec<usize> = scaled.iter().map(|&x| (x + 1e-9).floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    // Stable sort keeps index order (smaller amplitude first) on ties.
    order.sort_by(|&a, &b| {
        let ra = scaled[a] - counts[a] as f64;
        let rb = scaled[b] - counts[b] as f64;
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
    });
    if assigned <= n {
        for &i in order.iter().take(n - assigned) {
            counts[i] += 1;
        }
    } else {
        let drop: Vec<usize> = order.iter().rev().copied().filter(|&i| counts[i] > 0).take(assigned - n).collect();
        for i in drop {
            counts[i] -= 1;
        }
    }
    Composition::new(p.alphabet.clone(), counts)
}

/// `H(P_A) - k/n`.
pub fn rate_loss(p: &AmplitudeDistribution, k: usize, n: usize) -> f64 {
    p.entropy_bits() - k as f64 / n as f64
}

/// Rate loss including the `v/n` spent on flipping bits.
pub fn lccdm_rate_loss(p: &AmplitudeDistribution, k: usize, n: usize, v: usize) -> f64 {
    rate_loss(p, k, n) + v as f64 / n as f64
}

/// Blocklength, input bits and flipping bits of one shaper.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RateSpec {
    pub n: usize,
    pub k: usize,
    pub v: usize,
}

impl RateSpec {
    /// `k = n R_s + v`, which must be an integer.
    pub fn from_shaping_rate(shaping_rate: f64, n: usize, v: usize) -> Result<Self> {
        let info = shaping_rate * n as f64;
        let rounded = info.round();
        if (info - rounded).abs() > 1e-6 || rounded < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "R_s * n = {shaping_rate} * {n} = {info} is not an integer number of bits"
            )));
        }
        let k = rounded as usize + v;
        if v >= k {
            return Err(Error::InvalidConfig(format!("v = {v} must be below k = {k}")));
        }
        Ok(Self { n, k, v })
    }

    /// Information bits per amplitude, `(k - v) / n`.
    pub fn shaping_rate(&self) -> f64 {
        (self.k - self.v) as f64 / self.n as f64
    }
}

/// Outcome of rate matching a shaper to a target shaping rate.
#[derive(Debug, Clone)]
pub struct ShaperDesign {
    pub rate: RateSpec,
    pub composition: Composition,
    pub lambda: f64,
    /// Entropy of the MB distribution the composition was quantized from.
    pub mb_entropy: f64,
    pub distribution: AmplitudeDistribution,
    /// `H(P_A) - (k - v)/n` with `H` taken from the composition.
    pub rate_loss_list: f64,
}

const ENTROPY_STEP: f64 = 1e-5;

/// `ln(m!)` for `m = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for m in 1..=n {
        acc += (m as f64).ln();
        out.push(acc);
    }
    out
}

/// Rate matching: fixes `k = n R_s + v`, then raises the target entropy
/// from `R_s` in small steps until the quantized MB composition has a
/// codebook with at least `2^k` entries. Returns the first (lowest entropy)
/// such composition.
pub fn design_shaper(alphabet: &[u32], shaping_rate: f64, n: usize, v: usize) -> Result<ShaperDesign> {
    let rate = RateSpec::from_shaping_rate(shaping_rate, n, v)?;
    let max_h = (alphabet.len() as f64).log2();
    if shaping_rate >= max_h {
        return Err(Error::InvalidConfig(format!(
            "shaping rate {shaping_rate} is not below log2 of the alphabet size ({max_h})"
        )));
    }
    let lnf = ln_factorials(n);
    let ln2 = std::f64::consts::LN_2;
    let mut target = shaping_rate;
    while target <= max_h + 1e-12 {
        let lambda = solve_lambda_for_entropy(target.min(max_h), alphabet)?;
        let dist = mb_distribution(lambda, alphabet);
        let comp = composition_from_distribution(&dist, n)?;
        let approx = (lnf[n] - comp.counts().iter().map(|&c| lnf[c]).sum::<f64>()) / ln2;
        if approx >= rate.k as f64 - 1.0 {
            let exact_bits = multiset_count(&comp).bits() - 1;
            if exact_bits >= rate.k as u64 {
                let rate_loss_list = comp.entropy_bits() - rate.shaping_rate();
                return Ok(ShaperDesign {
                    rate,
                    mb_entropy: dist.entropy_bits(),
                    distribution: dist,
                    composition: comp,
                    lambda,
                    rate_loss_list,
                });
            }
        }
        target += ENTROPY_STEP;
    }
    Err(Error::InvalidConfig(format!(
        "no composition of length {n} carries k = {} bits on this alphabet",
        rate.k
    )))
}
