//! Rates and error counts at the decision point, and per-block statistics.

use std::io::Write;

use crate::ccdm::Composition;
use crate::design::entropy_bits;
use crate::error::{Error, Result};
use crate::framer::PamLabeling;

/// Per-bit log-metric clip, in bits.
pub const METRIC_CLIP_BITS: f64 = 50.0;

/// One real dimension of the transmitted constellation with its prior.
#[derive(Debug, Clone, PartialEq)]
pub struct Pam1dModel {
    pub levels: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub labels: Vec<u32>,
    pub bits_per_symbol: usize,
    scale: f64,
    max_level: i32,
}

impl Pam1dModel {
    /// Amplitudes drawn from the composition, signs uniform.
    pub fn shaped(composition: &Composition, labeling: &PamLabeling, scale: f64) -> Self {
        let p = composition.probabilities();
        Self::build(labeling, scale, |a| composition.index_of(a).map_or(0.0, |i| p[i] / 2.0))
    }

    pub fn uniform(labeling: &PamLabeling, scale: f64) -> Self {
        let p = 1.0 / (2 * labeling.num_amplitudes()) as f64;
        Self::build(labeling, scale, |_| p)
    }

    fn build(labeling: &PamLabeling, scale: f64, prob: impl Fn(u32) -> f64) -> Self {
        let int_levels = labeling.levels();
        Self {
            levels: int_levels.iter().map(|&l| l as f64 * scale).collect(),
            probabilities: int_levels.iter().map(|&l| prob(l.unsigned_abs())).collect(),
            labels: int_levels.iter().map(|&l| labeling.label(l)).collect(),
            bits_per_symbol: labeling.bits_per_symbol(),
            scale,
            max_level: labeling.max_amplitude() as i32,
        }
    }

    /// `H(X)` of one real dimension.
    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probabilities)
    }

    /// Index into `levels` of the level nearest to `x`.
    fn index_of(&self, x: f64) -> usize {
        let l = (2.0 * ((x / self.scale - 1.0) / 2.0).round() + 1.0).clamp(-self.max_level as f64, self.max_level as f64);
        ((l as i32 + self.max_level) / 2) as usize
    }

    /// Average energy per real dimension.
    pub fn energy(&self) -> f64 {
        self.levels.iter().zip(&self.probabilities).map(|(l, p)| l * l * p).sum()
    }
}

/// Per-dimension noise variance of a circular complex channel at `snr_db`
/// for complex symbols of average energy `symbol_energy`.
pub fn noise_variance_1d(snr_db: f64, symbol_energy: f64) -> f64 {
    symbol_energy / (2.0 * 10f64.powf(snr_db / 10.0))
}

fn log_sum_exp(vals: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = vals.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Monte-Carlo `sum_i H(B_i | Y)` per real dimension under a Gaussian
/// auxiliary channel with variance `noise_var`.
pub fn conditional_bit_entropy(x: &[f64], y: &[f64], model: &Pam1dModel, noise_var: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Empty);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    if !(noise_var > 0.0) {
        return Err(Error::OutOfRange("noise variance"));
    }
    let m = model.bits_per_symbol;
    let log_prior: Vec<f64> = model.probabilities.iter().map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY }).collect();
    let mut total = 0.0f64;
    let mut lw = vec![0.0f64; model.levels.len()];
    for (&xt, &yt) in x.iter().zip(y) {
        let tx = model.index_of(xt);
        for (j, w) in lw.iter_mut().enumerate() {
            let d = yt - model.levels[j];
            *w = log_prior[j] - d * d / (2.0 * noise_var);
        }
        let all = log_sum_exp(lw.iter().copied());
        for bit in 0..m {
            let shift = m - 1 - bit;
            let b = (model.labels[tx] >> shift) & 1;
            let same = log_sum_exp(
                lw.iter().zip(&model.labels).filter(|(_, &l)| (l >> shift) & 1 == b).map(|(&w, _)| w),
            );
            let bits = ((all - same) / std::f64::consts::LN_2).clamp(0.0, METRIC_CLIP_BITS);
            total += bits;
        }
    }
    Ok(total / x.len() as f64)
}

/// Finite-blocklength BMD rate in bit/4D-symbol:
/// `4 [H(X) - sum_i H(B_i | Y)] - 4 R_L`.
///
/// `x` and `y` hold real-dimension samples (both quadratures interleaved
/// or concatenated); `noise_var` is the per-dimension variance.
pub fn air_bmd(x: &[f64], y: &[f64], model: &Pam1dModel, rate_loss_list: f64, noise_var: f64) -> Result<f64> {
    let cond = conditional_bit_entropy(x, y, model, noise_var)?;
    Ok(4.0 * (model.entropy_bits() - cond) - 4.0 * rate_loss_list)
}

/// Fraction of differing bits.
pub fn pre_fec_ber(tx: &[u8], rx: &[u8]) -> Result<f64> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch { expected: tx.len(), got: rx.len() });
    }
    if tx.is_empty() {
        return Err(Error::Empty);
    }
    let errors = tx.iter().zip(rx).filter(|(a, b)| (**a != 0) != (**b != 0)).count();
    Ok(errors as f64 / tx.len() as f64)
}

/// Per-block measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRecord {
    pub block_id: usize,
    pub edi_db: f64,
    pub snr_db: f64,
}

/// One sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub launch_dbm: f64,
    pub effective_snr_db: f64,
    pub air_bit4d: f64,
    pub pre_fec_ber: f64,
    pub mean_edi_db: f64,
    pub blocks: Vec<BlockRecord>,
}

/// Formats a float for CSV, writing `-inf` / `inf` for infinities.
pub fn fmt_csv(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.6}")
    }
}

/// Fixed-width histogram with bins `[lo + i w, lo + (i + 1) w)`; `lo` is
/// the data minimum floored to a multiple of `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
}

/// Histogram bin width for dB-valued quantities.
pub const HISTOGRAM_BIN_DB: f64 = 0.1;

pub fn histogram(values: &[f64], width: f64) -> Histogram {
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if finite.is_empty() {
        return Histogram { lo: 0.0, width, counts: vec![] };
    }
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = (min / width).floor() * width;
    let bins = (((max - lo) / width).floor() as usize) + 1;
    let mut counts = vec![0; bins];
    for v in finite {
        let b = (((v - lo) / width).floor() as usize).min(bins - 1);
        counts[b] += 1;
    }
    Histogram { lo, width, counts }
}

/// Writes `block_id,edi_db,snr_db`.
pub fn scatter_export<W: Write>(records: &[BlockRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "block_id,edi_db,snr_db")?;
    for r in records {
        writeln!(out, "{},{},{}", r.block_id, fmt_csv(r.edi_db), fmt_csv(r.snr_db))?;
    }
    Ok(())
}

/// Writes `quantity,bin_lo,bin_hi,count` for both marginals.
pub fn histogram_export<W: Write>(records: &[BlockRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "quantity,bin_lo,bin_hi,count")?;
    for (name, vals) in [
        ("edi_db", records.iter().map(|r| r.edi_db).collect::<Vec<_>>()),
        ("snr_db", records.iter().map(|r| r.snr_db).collect::<Vec<_>>()),
    ] {
        let h = histogram(&vals, HISTOGRAM_BIN_DB);
        for (i, c) in h.counts.iter().enumerate() {
            let lo = h.lo + i as f64 * h.width;
            writeln!(out, "{name},{},{},{c}", fmt_csv(lo), fmt_csv(lo + h.width))?;
        }
    }
    Ok(())
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Pearson correlation.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    pearson(&ranks(a), &ranks(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ber_edges() {
        assert_eq!(pre_fec_ber(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap(), 0.0);
        assert_eq!(pre_fec_ber(&[0, 1, 1, 0], &[1, 0, 0, 1]).unwrap(), 1.0);
        assert!(pre_fec_ber(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn noiseless_uniform_256qam_reaches_16_bits() {
        let lab = PamLabeling::new(4);
        let scale = crate::framer::uniform_scale(&lab);
        let model = Pam1dModel::uniform(&lab, scale);
        let x: Vec<f64> = (0..4000).map(|i| model.levels[i % 16]).collect();
        let air = air_bmd(&x, &x, &model, 0.0, 1e-12).unwrap();
        assert_eq!(air, 16.0);
    }

    #[test]
    fn air_errors() {
        let lab = PamLabeling::new(2);
        let model = Pam1dModel::uniform(&lab, 1.0);
        assert_eq!(air_bmd(&[], &[], &model, 0.0, 1.0), Err(Error::Empty));
        assert!(air_bmd(&[1.0], &[1.0], &model, 0.0, 0.0).is_err());
        assert!(air_bmd(&[1.0], &[1.0, 2.0], &model, 0.0, 1.0).is_err());
    }

    #[test]
    fn scatter_rows() {
        let recs: Vec<BlockRecord> =
            (0..3).map(|i| BlockRecord { block_id: i, edi_db: -1.0 - i as f64, snr_db: 20.0 }).collect();
        let mut buf = Vec::new();
        scatter_export(&recs[..1], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
        let mut buf = Vec::new();
        scatter_export(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("block_id,edi_db,snr_db\n0,-1.000000,20.000000"));
        assert_eq!(fmt_csv(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn histogram_bins() {
        let h = histogram(&[0.05, 0.15, 0.16, 0.34], 0.1);
        assert_eq!(h.lo, 0.0);
        assert_eq!(h.counts, vec![1, 2, 0, 1]);
        assert_eq!(h.counts.iter().sum::<usize>(), 4);
    }

    #[test]
    fn rank_correlation() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman(&a, &[10.0, 20.0, 30.0, 40.0, 50.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&a, &[5.0, 4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert!((spearman(&[1.0, 1.0, 2.0], &[1.0, 1.0, 2.0]) - 1.0).abs() < 1e-12);
    }
}
