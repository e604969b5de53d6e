//! List-encoding CCDM.
//!
//! Each branch inserts `v` flipping bits into its `k - v` information bits
//! and encodes all `2^v` variants. Every (in-phase, quadrature) pair of
//! candidates forms a sign-less pseudo-QAM block; the pair with the lowest
//! EDI is transmitted. The receiver decodes as plain CCDM and drops the
//! flipping bits.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::bits::BitBlock;
use crate::ccdm::{AmplitudeBlock, Ccdm, Composition};
use crate::design::design_shaper;
use crate::edi::{edi_of_integer_energies, mean_linear_db, EdiValue};
use crate::error::{Error, Result};

/// Where the flipping bits go in the CCDM input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum FlipPosition {
    #[default]
    Prefix,
    Suffix,
}

impl fmt::Display for FlipPosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlipPosition::Prefix => "prefix",
            FlipPosition::Suffix => "suffix",
        })
    }
}

impl FromStr for FlipPosition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prefix" => Ok(FlipPosition::Prefix),
            "suffix" => Ok(FlipPosition::Suffix),
            other => Err(Error::Parse(format!("unknown flip position {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LccdmConfig {
    pub composition: Composition,
    /// Total CCDM input bits, flipping bits included.
    pub k: usize,
    pub v: usize,
    pub window: usize,
    pub flip_position: FlipPosition,
}

impl LccdmConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.composition.n();
        if self.v > self.k {
            return Err(Error::InvalidConfig(format!("v = {} exceeds k = {}", self.v, self.k)));
        }
        if self.v > 12 {
            return Err(Error::InvalidConfig(format!("v = {} gives an impractical list size", self.v)));
        }
        if self.window % 2 != 0 {
            return Err(Error::OddWindow(self.window));
        }
        if self.window == 0 || self.window >= n {
            return Err(Error::WindowTooLarge { window: self.window, n });
        }
        if n - self.window < 2 {
            return Err(Error::DegenerateWindow { window: self.window, n });
        }
        Ok(())
    }

    pub fn info_bits(&self) -> usize {
        self.k - self.v
    }
}

/// The `2^v` CCDM inputs obtained by inserting every flipping pattern.
/// Patterns are enumerated 0..2^v, MSB-first.
pub fn candidate_inputs(info: &BitBlock, v: usize, position: FlipPosition) -> Vec<BitBlock> {
    (0..1u64 << v)
        .map(|f| {
            let flips = BitBlock::new((0..v).map(|b| ((f >> (v - 1 - b)) & 1) as u8).collect());
            match position {
                FlipPosition::Prefix => flips.concat(info),
                FlipPosition::Suffix => info.concat(&flips),
            }
        })
        .collect()
}

/// Selected pair of amplitude blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct LccdmOutput {
    pub a_i: AmplitudeBlock,
    pub a_q: AmplitudeBlock,
    /// EDI of the pseudo-QAM block on the unscaled amplitude grid.
    pub raw_edi: EdiValue,
    /// Same EDI with the block scaled to unit average symbol energy.
    pub edi: EdiValue,
    /// Zero-based flipping patterns of the in-phase and quadrature branch.
    pub selected: (usize, usize),
}

/// List-encoding shaper bound to one configuration.
#[derive(Debug, Clone)]
pub struct Lccdm {
    cfg: LccdmConfig,
    ccdm: Ccdm,
    symbol_energy: f64,
    parallel: bool,
}

impl Lccdm {
    pub fn new(cfg: LccdmConfig) -> Result<Self> {
        cfg.validate()?;
        let ccdm = Ccdm::with_input_length(cfg.composition.clone(), cfg.k)?;
        let symbol_energy = 2.0 * cfg.composition.second_moment();
        Ok(Self { cfg, ccdm, symbol_energy, parallel: false })
    }

    /// Evaluate candidates on the rayon pool. Output is unchanged.
    pub fn parallel(mut self, on: bool) -> Self {
        self.parallel = on;
        self
    }

    pub fn config(&self) -> &LccdmConfig {
        &self.cfg
    }

    pub fn ccdm(&self) -> &Ccdm {
        &self.ccdm
    }

    /// Average energy `2 E[A^2]` of an unscaled pseudo-QAM symbol.
    pub fn symbol_energy(&self) -> f64 {
        self.symbol_energy
    }

    /// All `2^v` candidate codewords of one branch.
    pub fn branch_candidates(&self, info: &BitBlock) -> Result<Vec<AmplitudeBlock>> {
        if info.len() != self.cfg.info_bits() {
            return Err(Error::LengthMismatch { expected: self.cfg.info_bits(), got: info.len() });
        }
        let inputs = candidate_inputs(info, self.cfg.v, self.cfg.flip_position);
        if self.parallel {
            inputs.par_iter().map(|b| self.ccdm.encode(b)).collect()
        } else {
            inputs.iter().map(|b| self.ccdm.encode(b)).collect()
        }
    }

    /// EDI of every pseudo-QAM pair, row-major in `(i, j)`.
    pub fn candidate_edis(&self, cand_i: &[AmplitudeBlock], cand_q: &[AmplitudeBlock]) -> Result<Vec<EdiValue>> {
        let sq = |b: &AmplitudeBlock| b.as_slice().iter().map(|&a| a * a).collect::<Vec<u32>>();
        let sq_i: Vec<Vec<u32>> = cand_i.iter().map(sq).collect();
        let sq_q: Vec<Vec<u32>> = cand_q.iter().map(sq).collect();
        let window = self.cfg.window;
        let eval = |idx: usize| {
            let (i, j) = (idx / sq_q.len(), idx % sq_q.len());
            let e: Vec<u32> = sq_i[i].iter().zip(&sq_q[j]).map(|(a, b)| a + b).collect();
            edi_of_integer_energies(&e, window)
        };
        let total = sq_i.len() * sq_q.len();
        if self.parallel {
            (0..total).into_par_iter().map(eval).collect()
        } else {
            (0..total).map(eval).collect()
        }
    }

    pub fn encode(&self, info_i: &BitBlock, info_q: &BitBlock) -> Result<LccdmOutput> {
        let cand_i = self.branch_candidates(info_i)?;
        let cand_q = self.branch_candidates(info_q)?;
        let edis = self.candidate_edis(&cand_i, &cand_q)?;
        // First minimum in row-major order is the lexicographically
        // smallest (i, j) among ties.
        let (best, raw) = edis
            .iter()
            .enumerate()
            .fold(None::<(usize, EdiValue)>, |acc, (idx, &e)| match acc {
                Some((_, cur)) if cur.linear <= e.linear => acc,
                _ => Some((idx, e)),
            })
            .expect("at least one candidate");
        let (i, j) = (best / cand_q.len(), best % cand_q.len());
        Ok(LccdmOutput {
            a_i: cand_i[i].clone(),
            a_q: cand_q[j].clone(),
            raw_edi: raw,
            edi: raw.scaled(1.0 / self.symbol_energy),
            selected: (i, j),
        })
    }

    /// Decodes both branches and drops the flipping bits.
    pub fn decode(&self, a_i: &AmplitudeBlock, a_q: &AmplitudeBlock) -> Result<(BitBlock, BitBlock)> {
        Ok((self.decode_branch(a_i)?, self.decode_branch(a_q)?))
    }

    pub fn decode_branch(&self, a: &AmplitudeBlock) -> Result<BitBlock> {
        let bits = self.ccdm.decode(a)?;
        let (k, v) = (self.cfg.k, self.cfg.v);
        Ok(match self.cfg.flip_position {
            FlipPosition::Prefix => bits.slice(v..k),
            FlipPosition::Suffix => bits.slice(0..k - v),
        })
    }
}

pub fn lccdm_encode(info_i: &BitBlock, info_q: &BitBlock, cfg: &LccdmConfig) -> Result<LccdmOutput> {
    Lccdm::new(cfg.clone())?.encode(info_i, info_q)
}

pub fn lccdm_decode(a_i: &AmplitudeBlock, a_q: &AmplitudeBlock, cfg: &LccdmConfig) -> Result<(BitBlock, BitBlock)> {
    Lccdm::new(cfg.clone())?.decode(a_i, a_q)
}

/// Uniform random information bits from a seeded ChaCha20 stream.
pub fn random_bits(rng: &mut ChaCha20Rng, len: usize) -> BitBlock {
    BitBlock::new((0..len).map(|_| rng.random::<bool>() as u8).collect())
}

/// Parameters of a flipping-bit sweep.
#[derive(Debug, Clone)]
pub struct FlipSweep {
    pub alphabet: Vec<u32>,
    pub n: usize,
    pub shaping_rate: f64,
    pub window: usize,
    pub blocks: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipSweepRow {
    pub v: usize,
    pub prefix_db: f64,
    pub suffix_db: f64,
}

/// Mean unit-energy EDI (dB) of the selected blocks over `blocks` random
/// information blocks.
pub fn mean_selected_edi_db(shaper: &Lccdm, blocks: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let info = shaper.config().info_bits();
    let inputs: Vec<(BitBlock, BitBlock)> =
        (0..blocks).map(|_| (random_bits(&mut rng, info), random_bits(&mut rng, info))).collect();
    let edis = inputs
        .iter()
        .map(|(i, q)| shaper.encode(i, q).map(|o| o.edi))
        .collect::<Result<Vec<_>>>()?;
    mean_linear_db(edis)
}

/// Mean EDI versus `v` for prefix and suffix flipping. For each `v` the
/// composition is rate matched to the fixed shaping rate, and both
/// positions see identical information bits.
pub fn prefix_suffix_sweep(sweep: &FlipSweep, v_range: impl IntoIterator<Item = usize>) -> Result<Vec<FlipSweepRow>> {
    v_range
        .into_iter()
        .map(|v| {
            let design = design_shaper(&sweep.alphabet, sweep.shaping_rate, sweep.n, v)?;
            let mk = |flip_position| {
                Lccdm::new(LccdmConfig {
                    composition: design.composition.clone(),
                    k: design.rate.k,
                    v,
                    window: sweep.window,
                    flip_position,
                })
            };
            let seed = sweep.seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            Ok(FlipSweepRow {
                v,
                prefix_db: mean_selected_edi_db(&mk(FlipPosition::Prefix)?, sweep.blocks, seed)?,
                suffix_db: mean_selected_edi_db(&mk(FlipPosition::Suffix)?, sweep.blocks, seed)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccdm::ccdm_encode;
    use crate::edi::edi_estimate;
    use num_complex::Complex64;

    fn table_one() -> Composition {
        Composition::new(vec![1, 3, 5, 7], vec![4, 3, 2, 1]).unwrap()
    }

    fn cfg(v: usize, k: usize, flip_position: FlipPosition) -> LccdmConfig {
        LccdmConfig { composition: table_one(), k, v, window: 4, flip_position }
    }

    #[test]
    fn candidate_patterns() {
        let info = BitBlock::zeros(9);
        assert_eq!(candidate_inputs(&info, 0, FlipPosition::Prefix), vec![info.clone()]);
        let pre: Vec<String> =
            candidate_inputs(&info, 1, FlipPosition::Prefix).iter().map(|b| b.to_string()).collect();
        assert_eq!(pre, ["0000000000", "1000000000"]);
        let suf: Vec<String> =
            candidate_inputs(&info, 1, FlipPosition::Suffix).iter().map(|b| b.to_string()).collect();
        assert_eq!(suf, ["0000000000", "0000000001"]);
        let two: Vec<String> = candidate_inputs(&"1".parse().unwrap(), 2, FlipPosition::Prefix)
            .iter()
            .map(|b| b.to_string())
            .collect();
        assert_eq!(two, ["001", "011", "101", "111"]);
    }

    #[test]
    fn v_zero_is_plain_ccdm() {
        let c = cfg(0, 10, FlipPosition::Prefix);
        let bi: BitBlock = "0110100101".parse().unwrap();
        let bq: BitBlock = "1110000001".parse().unwrap();
        let out = lccdm_encode(&bi, &bq, &c).unwrap();
        assert_eq!(out.a_i, ccdm_encode(&bi, &table_one()).unwrap());
        assert_eq!(out.a_q, ccdm_encode(&bq, &table_one()).unwrap());
        assert_eq!(out.selected, (0, 0));
        assert_eq!(lccdm_decode(&out.a_i, &out.a_q, &c).unwrap(), (bi, bq));
    }

    #[test]
    fn selection_is_exhaustive_minimum() {
        let shaper = Lccdm::new(cfg(2, 12, FlipPosition::Prefix)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..50 {
            let bi = random_bits(&mut rng, 10);
            let bq = random_bits(&mut rng, 10);
            let out = shaper.encode(&bi, &bq).unwrap();
            let ci = shaper.branch_candidates(&bi).unwrap();
            let cq = shaper.branch_candidates(&bq).unwrap();
            let mut best = (f64::INFINITY, (0, 0));
            for (i, a) in ci.iter().enumerate() {
                for (j, b) in cq.iter().enumerate() {
                    let x: Vec<Complex64> = a
                        .as_slice()
                        .iter()
                        .zip(b.as_slice())
                        .map(|(&r, &q)| Complex64::new(r as f64, q as f64))
                        .collect();
                    let e = edi_estimate(&x, 4).unwrap().linear;
                    if e < best.0 - 1e-12 {
                        best = (e, (i, j));
                    }
                }
            }
            assert!((out.raw_edi.linear - best.0).abs() < 1e-12);
            assert_eq!(out.selected, best.1);
            assert_eq!(shaper.decode(&out.a_i, &out.a_q).unwrap(), (bi, bq));
        }
    }

    #[test]
    fn parallel_path_matches_serial() {
        let serial = Lccdm::new(cfg(3, 13, FlipPosition::Suffix)).unwrap();
        let parallel = serial.clone().parallel(true);
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..20 {
            let bi = random_bits(&mut rng, 10);
            let bq = random_bits(&mut rng, 10);
            assert_eq!(serial.encode(&bi, &bq).unwrap(), parallel.encode(&bi, &bq).unwrap());
        }
    }

    #[test]
    fn decoder_ignores_selection() {
        let shaper = Lccdm::new(cfg(2, 12, FlipPosition::Prefix)).unwrap();
        let info: BitBlock = "1010101010".parse().unwrap();
        for cand in shaper.branch_candidates(&info).unwrap() {
            assert_eq!(shaper.decode_branch(&cand).unwrap(), info);
        }
    }

    #[test]
    fn config_errors() {
        assert!(Lccdm::new(cfg(11, 10, FlipPosition::Prefix)).is_err());
        assert!(Lccdm::new(LccdmConfig { window: 10, ..cfg(1, 10, FlipPosition::Prefix) }).is_err());
        assert!(Lccdm::new(LccdmConfig { window: 3, ..cfg(1, 10, FlipPosition::Prefix) }).is_err());
        assert!(Lccdm::new(cfg(1, 14, FlipPosition::Prefix)).is_err());
        let shaper = Lccdm::new(cfg(1, 10, FlipPosition::Prefix)).unwrap();
        assert!(shaper.encode(&BitBlock::zeros(10), &BitBlock::zeros(9)).is_err());
    }

    #[test]
    fn flip_position_text() {
        assert_eq!("suffix".parse::<FlipPosition>().unwrap(), FlipPosition::Suffix);
        assert_eq!(FlipPosition::Prefix.to_string(), "prefix");
        assert!("middle".parse::<FlipPosition>().is_err());
    }
}
