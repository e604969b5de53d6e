//! Transmitter chain: information bits, amplitude shaper, sign bits and
//! QAM framing for one signaling variant, plus seed substreams.

use num_complex::Complex64;
use pas_core::design::{design_shaper, ShaperDesign};
use pas_core::edi::edi_estimate;
use pas_core::framer::{frame_qam, normalization_scale, uniform_scale, PamLabeling, QamBlock, SignSource};
use pas_core::lccdm::random_bits;
use pas_core::metrics::Pam1dModel;
use pas_core::{AmplitudeBlock, BitBlock, Composition, EdiValue, Lccdm, LccdmConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::config::{ShaperSection, Signaling, Variant};
use crate::error::{LabError, Result};
use crate::rates::{pas_total_rate, uniform_total_rate};

/// Substream domains of the master seed.
pub const DOMAIN_INFO: u64 = 0x1;
pub const DOMAIN_SIGN: u64 = 0x2;
pub const DOMAIN_ASE: u64 = 0x3;
pub const DOMAIN_EDI: u64 = 0x4;

/// Seed of domain `domain` under master seed `seed`.
pub fn domain_seed(seed: u64, domain: u64) -> u64 {
    seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Stream number of (channel, block, quadrature).
pub fn stream_id(channel: usize, block: usize, quadrature: usize) -> u64 {
    ((channel as u64) << 41) | ((block as u64) << 1) | quadrature as u64
}

/// Generator of one (channel, block) in a domain.
pub fn substream(seed: u64, domain: u64, channel: usize, block: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(domain_seed(seed, domain));
    rng.set_stream(stream_id(channel, block, 0));
    rng
}

enum Shaper {
    Pas { design: ShaperDesign, lccdm: Lccdm },
    Uniform,
}

/// One shaped block ready for the channel.
#[derive(Debug, Clone)]
pub struct TxBlock {
    pub symbols: Vec<Complex64>,
    /// EDI of the unit-energy block.
    pub edi: EdiValue,
    pub info_bits: usize,
}

pub struct Transmitter {
    pub variant: Variant,
    pub n: usize,
    pub window: usize,
    pub labeling: PamLabeling,
    pub scale: f64,
    shaper: Shaper,
    signs: SignSource,
}

impl Transmitter {
    pub fn new(shaper: &ShaperSection, variant: &Variant, n: usize, seed: u64) -> Result<Self> {
        let labeling = PamLabeling::new(shaper.label_bits());
        let window = shaper.window_for(n);
        let signs = SignSource::new(domain_seed(seed, DOMAIN_SIGN));
        let (shaper_impl, scale) = match variant.signaling {
            Signaling::Uniform => (Shaper::Uniform, uniform_scale(&labeling)),
            Signaling::Pas => {
                let alphabet = Composition::odd_alphabet(labeling.num_amplitudes());
                let design = design_shaper(&alphabet, variant.shaping_rate(shaper), n, variant.v)?;
                let lccdm = Lccdm::new(LccdmConfig {
                    composition: design.composition.clone(),
                    k: design.rate.k,
                    v: variant.v,
                    window,
                    flip_position: shaper.flip()?,
                })?;
                let scale = normalization_scale(&design.composition);
                (Shaper::Pas { design, lccdm }, scale)
            }
        };
        Ok(Self { variant: variant.clone(), n, window, labeling, scale, shaper: shaper_impl, signs })
    }

    pub fn design(&self) -> Option<&ShaperDesign> {
        match &self.shaper {
            Shaper::Pas { design, .. } => Some(design),
            Shaper::Uniform => None,
        }
    }

    pub fn lccdm(&self) -> Option<&Lccdm> {
        match &self.shaper {
            Shaper::Pas { lccdm, .. } => Some(lccdm),
            Shaper::Uniform => None,
        }
    }

    /// Information bits per amplitude branch and block.
    pub fn info_bits(&self) -> usize {
        match &self.shaper {
            Shaper::Pas { lccdm, .. } => lccdm.config().info_bits(),
            Shaper::Uniform => self.n * (self.labeling.bits_per_symbol() - 1),
        }
    }

    pub fn rate_loss_list(&self) -> f64 {
        self.design().map_or(0.0, |d| d.rate_loss_list)
    }

    /// Total rate in bit/4D-symbol for the given shaper settings.
    pub fn total_rate(&self, shaper: &ShaperSection) -> f64 {
        let m = self.labeling.bits_per_symbol();
        match self.variant.signaling {
            Signaling::Pas => pas_total_rate(self.variant.shaping_rate(shaper), self.variant.code_rate(shaper), m),
            Signaling::Uniform => uniform_total_rate(self.variant.code_rate(shaper), m),
        }
    }

    pub fn model(&self) -> Pam1dModel {
        match &self.shaper {
            Shaper::Pas { design, .. } => Pam1dModel::shaped(&design.composition, &self.labeling, self.scale),
            Shaper::Uniform => Pam1dModel::uniform(&self.labeling, self.scale),
        }
    }

    /// Amplitudes of one block from its information substream.
    fn amplitudes(&self, rng: &mut ChaCha20Rng) -> Result<(AmplitudeBlock, AmplitudeBlock)> {
        match &self.shaper {
            Shaper::Pas { lccdm, .. } => {
                let bits = lccdm.config().info_bits();
                let info_i = random_bits(rng, bits);
                let info_q = random_bits(rng, bits);
                let out = lccdm.encode(&info_i, &info_q)?;
                Ok((out.a_i, out.a_q))
            }
            Shaper::Uniform => {
                let q = self.labeling.num_amplitudes() as u32;
                let mut draw = || AmplitudeBlock::new((0..self.n).map(|_| 2 * rng.random_range(0..q) + 1).collect());
                let a_i = draw();
                let a_q = draw();
                Ok((a_i, a_q))
            }
        }
    }

    /// Sign bits of (channel, block) for the I and Q branches.
    pub fn sign_bits(&self, channel: usize, block: usize) -> (BitBlock, BitBlock) {
        (self.signs.bits(stream_id(channel, block, 0), self.n), self.signs.bits(stream_id(channel, block, 1), self.n))
    }

    /// Frames given amplitudes with the sign bits of (channel, block).
    pub fn frame(&self, a_i: &AmplitudeBlock, a_q: &AmplitudeBlock, channel: usize, block: usize) -> Result<QamBlock> {
        let (s_i, s_q) = self.sign_bits(channel, block);
        Ok(frame_qam(a_i, a_q, &s_i, &s_q, self.scale)?)
    }

    /// Block `block` of channel `channel`.
    pub fn block(&self, seed: u64, channel: usize, block: usize) -> Result<TxBlock> {
        let mut rng = substream(seed, DOMAIN_INFO, channel, block);
        let (a_i, a_q) = self.amplitudes(&mut rng)?;
        let qam = self.frame(&a_i, &a_q, channel, block)?;
        let edi = edi_estimate(&qam.symbols, self.window)?;
        Ok(TxBlock { symbols: qam.symbols, edi, info_bits: 2 * self.info_bits() })
    }

    /// Concatenated blocks `0..blocks` of one channel, with per-block EDI.
    pub fn channel(&self, seed: u64, channel: usize, blocks: usize) -> Result<(Vec<Complex64>, Vec<EdiValue>)> {
        let mut symbols = Vec::with_capacity(blocks * self.n);
        let mut edis = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let t = self.block(seed, channel, b)?;
            symbols.extend(t.symbols);
            edis.push(t.edi);
        }
        Ok((symbols, edis))
    }

    /// Mean EDI in dB of `blocks` channel-free blocks from the EDI domain.
    pub fn mean_edi_db(&self, seed: u64, blocks: usize) -> Result<f64> {
        if blocks == 0 {
            return Err(LabError::Config("edi_blocks must be positive".into()));
        }
        let edi_seed = domain_seed(seed, DOMAIN_EDI);
        let edis = (0..blocks).map(|b| self.block(edi_seed, 0, b).map(|t| t.edi)).collect::<Result<Vec<_>>>()?;
        Ok(pas_core::edi::mean_linear_db(edis)?)
    }
}
