//! PAM/QAM framing with the 1D symbol mapping.
//!
//! Labeling of `2^m`-PAM: bit 0 is the sign bit (`0 -> +`, `1 -> -`), bits
//! 1..m are the binary reflected Gray code of the amplitude index
//! `(|x| - 1) / 2`, most significant bit first. For 16-PAM:
//!
//! | amplitude | 1   | 3   | 5   | 7   | 9   | 11  | 13  | 15  |
//! |-----------|-----|-----|-----|-----|-----|-----|-----|-----|
//! | bits 1..3 | 000 | 001 | 011 | 010 | 110 | 111 | 101 | 100 |

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bits::BitBlock;
use crate::ccdm::{AmplitudeBlock, Composition};
use crate::error::{Error, Result};

/// Gray labeling of a `2^m`-PAM with the sign as the leading bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PamLabeling {
    bits: usize,
}

impl PamLabeling {
    /// `bits_per_symbol >= 1`; 4 for 16-PAM (256QAM).
    pub fn new(bits_per_symbol: usize) -> Self {
        assert!((1..=16).contains(&bits_per_symbol), "unsupported PAM size");
        Self { bits: bits_per_symbol }
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn num_amplitudes(&self) -> usize {
        1 << (self.bits - 1)
    }

    pub fn max_amplitude(&self) -> u32 {
        2 * self.num_amplitudes() as u32 - 1
    }

    /// Signed levels `-(2^m - 1), ..., 2^m - 1` in increasing order.
    pub fn levels(&self) -> Vec<i32> {
        let q = self.num_amplitudes() as i32;
        (0..2 * q).map(|i| 2 * i - (2 * q - 1)).collect()
    }

    /// Label of a signed odd level, as an `m`-bit integer (sign bit is the MSB).
    pub fn label(&self, level: i32) -> u32 {
        let sign = (level < 0) as u32;
        let idx = (level.unsigned_abs() - 1) / 2;
        (sign << (self.bits - 1)) | (idx ^ (idx >> 1))
    }

    pub fn level_of_label(&self, label: u32) -> i32 {
        let sign = label >> (self.bits - 1);
        let mut g = label & ((1 << (self.bits - 1)) - 1);
        let mut idx = g;
        while g > 0 {
            g >>= 1;
            idx ^= g;
        }
        let a = (2 * idx + 1) as i32;
        if sign == 1 {
            -a
        } else {
            a
        }
    }

    /// Label bits of one level, MSB first.
    pub fn label_bits(&self, level: i32) -> impl Iterator<Item = u8> + '_ {
        let l = self.label(level);
        (0..self.bits).map(move |b| ((l >> (self.bits - 1 - b)) & 1) as u8)
    }

    /// Nearest odd level within range; boundaries sit on even integers.
    pub fn decide(&self, value: f64) -> i32 {
        let max = self.max_amplitude() as f64;
        let level = 2.0 * ((value - 1.0) / 2.0).round() + 1.0;
        level.clamp(-max, max) as i32
    }
}

/// Scale making `2 E[A^2] scale^2 = 1`.
pub fn normalization_scale(composition: &Composition) -> f64 {
    1.0 / (2.0 * composition.second_moment()).sqrt()
}

/// Unit-energy scale of a uniform `2^m`-PAM on both quadratures.
pub fn uniform_scale(labeling: &PamLabeling) -> f64 {
    let q = labeling.num_amplitudes() as f64;
    // E[A^2] over {1, 3, ..., 2q - 1} = (4q^2 - 1) / 3.
    1.0 / (2.0 * (4.0 * q * q - 1.0) / 3.0).sqrt()
}

/// Normalized complex symbols of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct QamBlock {
    pub symbols: Vec<Complex64>,
    pub scale: f64,
}

impl QamBlock {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols on the odd-integer grid.
    pub fn unscaled(&self) -> Vec<Complex64> {
        self.symbols.iter().map(|s| s / self.scale).collect()
    }
}

fn signed(a: u32, sign: u8) -> f64 {
    if sign == 0 {
        a as f64
    } else {
        -(a as f64)
    }
}

/// `x_t = scale (s_I(t) a_I(t) + j s_Q(t) a_Q(t))` with `(0, 1) -> (+1, -1)`.
pub fn frame_qam(
    a_i: &AmplitudeBlock,
    a_q: &AmplitudeBlock,
    signs_i: &BitBlock,
    signs_q: &BitBlock,
    scale: f64,
) -> Result<QamBlock> {
    let n = a_i.len();
    for got in [a_q.len(), signs_i.len(), signs_q.len()] {
        if got != n {
            return Err(Error::LengthMismatch { expected: n, got });
        }
    }
    let symbols = (0..n)
        .map(|t| {
            Complex64::new(
                signed(a_i.as_slice()[t], signs_i.as_slice()[t]),
                signed(a_q.as_slice()[t], signs_q.as_slice()[t]),
            ) * scale
        })
        .collect();
    Ok(QamBlock { symbols, scale })
}

/// Seedable uniform bit source standing in for FEC sign bits.
///
/// Stream `id` of seed `s` is ChaCha20 keyed by `seed_from_u64(s)` with
/// stream number `id`; bits are the `bool` draws of `rand` in order.
/// Different ids never share keystream.
#[derive(Debug, Clone, Copy)]
pub struct SignSource {
    seed: u64,
}

impl SignSource {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn rng(&self, stream: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    pub fn bits(&self, stream: u64, count: usize) -> BitBlock {
        let mut rng = self.rng(stream);
        BitBlock::new((0..count).map(|_| rng.random::<bool>() as u8).collect())
    }
}

pub fn sign_source(seed: u64, count: usize) -> BitBlock {
    SignSource::new(seed).bits(0, count)
}

/// Hard decisions on one received block.
#[derive(Debug, Clone, PartialEq)]
pub struct Demapped {
    pub amplitudes_i: AmplitudeBlock,
    pub amplitudes_q: AmplitudeBlock,
    pub signs_i: BitBlock,
    pub signs_q: BitBlock,
    /// Per symbol: the in-phase label then the quadrature label.
    pub bits: BitBlock,
}

/// Minimum-distance decisions per quadrature on a received block
/// normalized by `scale`.
pub fn hard_demap(y: &[Complex64], scale: f64, labeling: &PamLabeling) -> Demapped {
    let mut amps_i = Vec::with_capacity(y.len());
    let mut amps_q = Vec::with_capacity(y.len());
    let mut s_i = Vec::with_capacity(y.len());
    let mut s_q = Vec::with_capacity(y.len());
    let mut bits = Vec::with_capacity(2 * y.len() * labeling.bits_per_symbol());
    for s in y {
        let li = labeling.decide(s.re / scale);
        let lq = labeling.decide(s.im / scale);
        amps_i.push(li.unsigned_abs());
        amps_q.push(lq.unsigned_abs());
        s_i.push((li < 0) as u8);
        s_q.push((lq < 0) as u8);
        bits.extend(labeling.label_bits(li));
        bits.extend(labeling.label_bits(lq));
    }
    Demapped {
        amplitudes_i: AmplitudeBlock::new(amps_i),
        amplitudes_q: AmplitudeBlock::new(amps_q),
        signs_i: BitBlock::new(s_i),
        signs_q: BitBlock::new(s_q),
        bits: BitBlock::new(bits),
    }
}

/// Label bits of transmitted symbols, laid out as in [`hard_demap`].
pub fn label_bits(x: &[Complex64], scale: f64, labeling: &PamLabeling) -> BitBlock {
    hard_demap(x, scale, labeling).bits
}
