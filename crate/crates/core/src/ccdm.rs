//! Constant-composition distribution matching.
//!
//! Codewords are the distinct permutations of a fixed amplitude multiset,
//! indexed in ascending lexicographic order (alphabet order defines symbol
//! order). Input bits are read MSB-first as an integer and mapped to the
//! codeword of that rank; decoding ranks the codeword back. All arithmetic
//! is exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bits::BitBlock;
use crate::error::{Error, Result};

/// Amplitude alphabet with per-amplitude occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    alphabet: Vec<u32>,
    counts: Vec<usize>,
}

impl Composition {
    /// The alphabet must be strictly increasing; counts are aligned with it.
    pub fn new(alphabet: Vec<u32>, counts: Vec<usize>) -> Result<Self> {
        if alphabet.is_empty() {
            return Err(Error::InvalidComposition("empty alphabet".into()));
        }
        if alphabet.len() != counts.len() {
            return Err(Error::InvalidComposition(format!(
                "{} amplitudes but {} counts",
                alphabet.len(),
                counts.len()
            )));
        }
        if alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidComposition("alphabet must be strictly increasing".into()));
        }
        if alphabet[0] == 0 {
            return Err(Error::InvalidComposition("amplitudes must be positive".into()));
        }
        if counts.iter().sum::<usize>() == 0 {
            return Err(Error::InvalidComposition("blocklength must be positive".into()));
        }
        Ok(Self { alphabet, counts })
    }

    /// Odd-integer amplitude alphabet `{1, 3, ..., 2q - 1}` of a `2q`-PAM.
    pub fn odd_alphabet(num_amplitudes: usize) -> Vec<u32> {
        (0..num_amplitudes as u32).map(|i| 2 * i + 1).collect()
    }

    pub fn alphabet(&self) -> &[u32] {
        &self.alphabet
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Blocklength `n`.
    pub fn n(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Empirical amplitude distribution `n_a / n`.
    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// Entropy of the empirical amplitude distribution in bits.
    pub fn entropy_bits(&self) -> f64 {
        crate::design::entropy_bits(&self.probabilities())
    }

    /// Average squared amplitude `E[A^2]`.
    pub fn second_moment(&self) -> f64 {
        let n = self.n() as f64;
        self.alphabet
            .iter()
            .zip(&self.counts)
            .map(|(&a, &c)| (a as f64) * (a as f64) * c as f64)
            .sum::<f64>()
            / n
    }

    /// Index of an amplitude within the alphabet.
    pub fn index_of(&self, amplitude: u32) -> Option<usize> {
        self.alphabet.binary_search(&amplitude).ok()
    }

    fn histogram(&self, block: &AmplitudeBlock) -> Option<Vec<usize>> {
        let mut hist = vec![0usize; self.alphabet.len()];
        for &a in block.as_slice() {
            hist[self.index_of(a)?] += 1;
        }
        Some(hist)
    }

    /// Whether `block` is a permutation of this composition's multiset.
    pub fn matches(&self, block: &AmplitudeBlock) -> bool {
        block.len() == self.n() && self.histogram(block).as_deref() == Some(&self.counts[..])
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> =
            self.alphabet.iter().zip(&self.counts).map(|(a, c)| format!("{a}:{c}")).collect();
        write!(f, "[{}]", pairs.join(", "))
    }
}

/// A length-`n` amplitude sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AmplitudeBlock(Vec<u32>);

impl AmplitudeBlock {
    pub fn new(amplitudes: Vec<u32>) -> Self {
        Self(amplitudes)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl fmt::Display for AmplitudeBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl FromStr for AmplitudeBlock {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|tok| tok.parse::<u32>().map_err(|e| Error::Parse(format!("{tok:?}: {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(AmplitudeBlock)
    }
}

/// Number of distinct permutations `n! / prod(n_a!)`.
pub fn multiset_count(c: &Composition) -> BigUint {
    // Built as a product of binomials so every intermediate is an integer.
    let mut total = BigUint::one();
    let mut placed = 0usize;
    for &count in &c.counts {
        for j in 1..=count {
            total *= (placed + j) as u64;
            total /= j as u64;
        }
        placed += count;
    }
    total
}

/// `floor(log2(multiset_count(c)))`.
pub fn max_input_length(c: &Composition) -> usize {
    floor_log2(&multiset_count(c))
}

fn floor_log2(m: &BigUint) -> usize {
    (m.bits().max(1) - 1) as usize
}

/// Matcher for one composition, with the codebook size computed once.
#[derive(Debug, Clone)]
pub struct Ccdm {
    composition: Composition,
    codebook_size: BigUint,
    k: usize,
}

impl Ccdm {
    /// Uses the largest admissible input length.
    pub fn new(composition: Composition) -> Self {
        let codebook_size = multiset_count(&composition);
        let k = floor_log2(&codebook_size);
        Self { composition, codebook_size, k }
    }

    pub fn with_input_length(composition: Composition, k: usize) -> Result<Self> {
        let mut ccdm = Self::new(composition);
        if k > ccdm.k {
            return Err(Error::InputTooLong { k, max: ccdm.k });
        }
        ccdm.k = k;
        Ok(ccdm)
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    pub fn codebook_size(&self) -> &BigUint {
        &self.codebook_size
    }

    /// Configured input length `k`.
    pub fn input_length(&self) -> usize {
        self.k
    }

    pub fn max_input_length(&self) -> usize {
        floor_log2(&self.codebook_size)
    }

    pub fn unrank(&self, rank: &BigUint) -> Result<AmplitudeBlock> {
        if rank >= &self.codebook_size {
            return Err(Error::RankOutOfRange { codebook_bits: self.codebook_size.bits() });
        }
        let alphabet = &self.composition.alphabet;
        let mut counts = self.composition.counts.clone();
        let n = self.composition.n();
        let mut out = Vec::with_capacity(n);
        let mut r = rank.clone();
        // Number of completions of the current prefix.
        let mut m = self.codebook_size.clone();
        let mut remaining_types = counts.iter().filter(|&&c| c > 0).count();

        for pos in 0..n {
            let len = (n - pos) as u64;
            if remaining_types == 1 {
                let a = counts.iter().position(|&c| c > 0).expect("one symbol type left");
                out.extend(std::iter::repeat_n(alphabet[a], counts[a]));
                break;
            }
            // Symbol b owns ranks [m*cum_b/len, m*(cum_b + n_b)/len); compare
            // in the scaled domain r*len to stay within integers.
            let scaled = &r * len;
            let mut cum = 0u64;
            let mut chosen = None;
            for (a, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let next = cum + c as u64;
                if next == len || scaled < &m * next {
                    chosen = Some(a);
                    break;
                }
                cum = next;
            }
            let a = chosen.expect("rank below codebook size always selects a symbol");
            if cum > 0 {
                r -= &m * cum / len;
            }
            m *= counts[a] as u64;
            m /= len;
            counts[a] -= 1;
            if counts[a] == 0 {
                remaining_types -= 1;
            }
            out.push(alphabet[a]);
        }
        Ok(AmplitudeBlock(out))
    }

    pub fn rank(&self, block: &AmplitudeBlock) -> Result<BigUint> {
        if block.len() != self.composition.n() {
            return Err(Error::CompositionMismatch);
        }
        let mut indices = Vec::with_capacity(block.len());
        for &a in block.as_slice() {
            indices.push(self.composition.index_of(a).ok_or(Error::CompositionMismatch)?);
        }
        let mut counts = self.composition.counts.clone();
        let mut hist = vec![0usize; counts.len()];
        for &i in &indices {
            hist[i] += 1;
        }
        if hist != counts {
            return Err(Error::CompositionMismatch);
        }

        let n = indices.len();
        let mut r = BigUint::zero();
        let mut m = self.codebook_size.clone();
        for (pos, &a) in indices.iter().enumerate() {
            let len = (n - pos) as u64;
            let cum: u64 = counts[..a].iter().map(|&c| c as u64).sum();
            if cum > 0 {
                r += &m * cum / len;
            }
            m *= counts[a] as u64;
            m /= len;
            counts[a] -= 1;
        }
        Ok(r)
    }

    /// Maps `k` bits to the codeword whose rank is their MSB-first value.
    pub fn encode(&self, bits: &BitBlock) -> Result<AmplitudeBlock> {
        if bits.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, got: bits.len() });
        }
        self.unrank(&bits.to_biguint())
    }

    pub fn decode(&self, block: &AmplitudeBlock) -> Result<BitBlock> {
        let r = self.rank(block)?;
        if r.bits() > self.k as u64 {
            return Err(Error::UnreachableCodeword { k: self.k });
        }
        BitBlock::from_biguint(&r, self.k)
    }
}

pub fn unrank(rank: &BigUint, c: &Composition) -> Result<AmplitudeBlock> {
    Ccdm::new(c.clone()).unrank(rank)
}

pub fn rank(block: &AmplitudeBlock, c: &Composition) -> Result<BigUint> {
    Ccdm::new(c.clone()).rank(block)
}

/// Encodes a `k`-bit block, `k = bits.len()`.
pub fn ccdm_encode(bits: &BitBlock, c: &Composition) -> Result<AmplitudeBlock> {
    Ccdm::with_input_length(c.clone(), bits.len())?.encode(bits)
}

pub fn ccdm_decode(block: &AmplitudeBlock, c: &Composition, k: usize) -> Result<BitBlock> {
    Ccdm::with_input_length(c.clone(), k)?.decode(block)
}
