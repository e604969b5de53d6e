//! Sweep drivers and their CSV artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use pas_core::edi::mean_linear_db;
use pas_core::framer::{hard_demap, label_bits};
use pas_core::lccdm::{prefix_suffix_sweep, FlipSweep};
use pas_core::metrics::{
    air_bmd, fmt_csv, histogram_export, noise_variance_1d, pre_fec_ber, scatter_export, BlockRecord, MetricReport,
};
use pas_core::Composition;
use pas_fiber::snr::{effective_snr_db, per_block_snr_db};
use pas_fiber::wdm::mean_power;
use pas_fiber::{FiberLink, LinkSimulator, NoiseMode};
use rayon::prelude::*;

use crate::chain::{domain_seed, Transmitter, DOMAIN_ASE, DOMAIN_EDI};
use crate::config::{ExperimentSpec, Noise, SweepKind, Variant};
use crate::error::{LabError, Result};
use crate::validate::{ensure_valid, validate_config};

pub const SWEEP_HEADER: &str = "launch_dbm,snr_db,air_bit4d,ber,mean_edi_db";
pub const BLOCKLENGTH_HEADER: &str = "n,variant,v,k,mean_edi_db,launch_dbm,snr_db,air_bit4d,ber";
pub const FLIPPING_HEADER: &str = "v,prefix_edi_db,suffix_edi_db";
pub const REACH_HEADER: &str = "variant,rate_bit4d,spans,distance_km,launch_dbm,snr_db,air_bit4d,ber,mean_edi_db";
pub const DESIGN_HEADER: &str = "variant,signaling,n,v,k,shaping_rate,total_rate_bit4d,composition_entropy,mb_entropy,rate_loss_list";

/// One simulated operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub report: MetricReport,
    pub max_nonlinear_phase: f64,
}

fn split_dims(x: &[Complex64]) -> Vec<f64> {
    x.iter().flat_map(|v| [v.re, v.im]).collect()
}

/// Simulates one launch power over `link` and measures the channel of
/// interest. `dump` receives waveform checkpoints when set.
pub fn simulate_point(
    spec: &ExperimentSpec,
    tx: &Transmitter,
    link: &FiberLink,
    launch_dbm: f64,
    dump: Option<PathBuf>,
) -> Result<PointResult> {
    let grid = spec.grid.sim_grid(tx.n, &spec.wdm)?;
    let blocks = grid.blocks_per_run;
    let mut sim = LinkSimulator::new(link.clone(), spec.wdm.clone(), grid)?;
    sim.abort_on_instability = spec.grid.abort_on_instability;
    sim.checkpoint_dir = dump;
    let center = spec.wdm.center_index();
    let mut channels = Vec::with_capacity(spec.wdm.num_channels);
    let mut edis = Vec::new();
    for c in 0..spec.wdm.num_channels {
        let (symbols, e) = tx.channel(spec.seed, c, blocks)?;
        if c == center {
            edis = e;
        }
        channels.push(symbols);
    }
    let noise = match spec.sweep.noise {
        Noise::Ase => NoiseMode::Ase,
        Noise::Noiseless => NoiseMode::Noiseless,
    };
    let out = sim.simulate(&channels, launch_dbm, noise, domain_seed(spec.seed, DOMAIN_ASE))?;
    let x = &channels[center];
    let raw = &out.received.raw;
    let snr_db = effective_snr_db(x, raw)?;
    let block_snr = per_block_snr_db(x, raw, tx.n)?;
    let y = &out.received.equalized;
    let noise_var = noise_variance_1d(snr_db, mean_power(x));
    let air = air_bmd(&split_dims(x), &split_dims(y), &tx.model(), tx.rate_loss_list(), noise_var)?;
    let tx_bits = label_bits(x, tx.scale, &tx.labeling);
    let rx_bits = hard_demap(y, tx.scale, &tx.labeling).bits;
    let ber = pre_fec_ber(tx_bits.as_slice(), rx_bits.as_slice())?;
    let records: Vec<BlockRecord> = edis
        .iter()
        .zip(&block_snr)
        .enumerate()
        .map(|(block_id, (e, &snr_db))| BlockRecord { block_id, edi_db: e.db(), snr_db })
        .collect();
    let mean_edi_db = mean_linear_db(edis)?;
    log::info!(
        "{} n={} P={launch_dbm} dBm: SNR {snr_db:.3} dB, AIR {air:.4}, BER {ber:.3e}, EDI {mean_edi_db:.3} dB",
        tx.variant.name,
        tx.n
    );
    Ok(PointResult {
        report: MetricReport {
            launch_dbm,
            effective_snr_db: snr_db,
            air_bit4d: air,
            pre_fec_ber: ber,
            mean_edi_db,
            blocks: records,
        },
        max_nonlinear_phase: out.max_nonlinear_phase,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn sweep_row(r: &MetricReport) -> String {
    format!(
        "{},{},{},{},{}",
        fmt_csv(r.launch_dbm),
        fmt_csv(r.effective_snr_db),
        fmt_csv(r.air_bit4d),
        fmt_csv(r.pre_fec_ber),
        fmt_csv(r.mean_edi_db)
    )
}

pub fn write_sweep_csv(path: &Path, reports: &[MetricReport]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", sweep_row(r))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_blocks_csv(dir: &Path, records: &[BlockRecord]) -> Result<()> {
    let mut out = create(&dir.join("blocks.csv"))?;
    scatter_export(records, &mut out)?;
    out.flush()?;
    let mut out = create(&dir.join("histograms.csv"))?;
    histogram_export(records, &mut out)?;
    out.flush()?;
    Ok(())
}

fn transmitters(spec: &ExperimentSpec, n: usize) -> Result<Vec<Transmitter>> {
    spec.variants.iter().map(|v| Transmitter::new(&spec.shaper, v, n, spec.seed)).collect()
}

fn design_row(spec: &ExperimentSpec, tx: &Transmitter) -> String {
    let v = &tx.variant;
    let (k, h, mb, loss) = match tx.design() {
        Some(d) => (d.rate.k.to_string(), d.composition.entropy_bits(), d.mb_entropy, d.rate_loss_list),
        None => (String::new(), (tx.labeling.num_amplitudes() as f64).log2(), f64::NAN, 0.0),
    };
    format!(
        "{},{},{},{},{k},{},{},{},{},{}",
        v.name,
        match v.signaling {
            crate::config::Signaling::Pas => "pas",
            crate::config::Signaling::Uniform => "uniform",
        },
        tx.n,
        v.v,
        fmt_csv(v.shaping_rate(&spec.shaper)),
        fmt_csv(tx.total_rate(&spec.shaper)),
        fmt_csv(h),
        if mb.is_nan() { String::new() } else { fmt_csv(mb) },
        fmt_csv(loss)
    )
}

fn write_design_csv(path: &Path, spec: &ExperimentSpec, txs: &[&Transmitter]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "{DESIGN_HEADER}")?;
    for tx in txs {
        writeln!(out, "{}", design_row(spec, tx))?;
    }
    out.flush()?;
    Ok(())
}

fn write_spec(dir: &Path, spec: &ExperimentSpec) -> Result<()> {
    let mut out = create(&dir.join("spec.toml"))?;
    out.write_all(spec.to_toml_string().as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Results of a launch-power sweep, per variant in configuration order.
#[derive(Debug, Clone)]
pub struct PowerSweep {
    pub variants: Vec<(Variant, Vec<PointResult>)>,
}

impl PowerSweep {
    /// Point with the highest effective SNR for each variant.
    pub fn best(&self) -> Vec<(&Variant, &PointResult)> {
        self.variants
            .iter()
            .map(|(v, pts)| {
                let best = pts
                    .iter()
                    .max_by(|a, b| a.report.effective_snr_db.total_cmp(&b.report.effective_snr_db))
                    .expect("non-empty sweep");
                (v, best)
            })
            .collect()
    }
}

/// Every variant at every launch power of the sweep section.
pub fn run_power_sweep(spec: &ExperimentSpec) -> Result<PowerSweep> {
    ensure_valid(&validate_config(spec))?;
    let txs = transmitters(spec, spec.shaper.n)?;
    let powers = &spec.sweep.launch_dbm;
    let jobs: Vec<(usize, f64)> = (0..txs.len()).flat_map(|v| powers.iter().map(move |&p| (v, p))).collect();
    let results = jobs
        .par_iter()
        .map(|&(v, p)| simulate_point(spec, &txs[v], &spec.fiber, p, None))
        .collect::<Result<Vec<_>>>()?;
    let mut it = results.into_iter();
    let variants = spec
        .variants
        .iter()
        .map(|v| (v.clone(), it.by_ref().take(powers.len()).collect()))
        .collect();
    Ok(PowerSweep { variants })
}

/// Writes `<variant>/sweep.csv` plus the per-block scatter and histograms of
/// each variant's best launch power.
pub fn write_power_sweep(dir: &Path, spec: &ExperimentSpec, sweep: &PowerSweep) -> Result<()> {
    write_spec(dir, spec)?;
    let txs = transmitters(spec, spec.shaper.n)?;
    write_design_csv(&dir.join("design.csv"), spec, &txs.iter().collect::<Vec<_>>())?;
    for ((variant, points), (_, best)) in sweep.variants.iter().zip(sweep.best()) {
        let vdir = dir.join(&variant.name);
        let reports: Vec<MetricReport> = points.iter().map(|p| p.report.clone()).collect();
        write_sweep_csv(&vdir.join("sweep.csv"), &reports)?;
        write_blocks_csv(&vdir, &best.report.blocks)?;
    }
    Ok(())
}

/// Single launch power (the first of the sweep list unless overridden) for
/// every variant, with optional waveform dumps.
pub fn run_simulation(spec: &ExperimentSpec, launch_dbm: Option<f64>, dir: &Path) -> Result<Vec<(Variant, PointResult)>> {
    ensure_valid(&validate_config(spec))?;
    let p = launch_dbm.or_else(|| spec.sweep.launch_dbm.first().copied()).ok_or_else(|| LabError::Config("no launch power".into()))?;
    let txs = transmitters(spec, spec.shaper.n)?;
    let results = txs
        .par_iter()
        .map(|tx| {
            let dump = spec.grid.dump_waveforms.then(|| dir.join(&tx.variant.name).join("waveforms"));
            simulate_point(spec, tx, &spec.fiber, p, dump)
        })
        .collect::<Result<Vec<_>>>()?;
    write_spec(dir, spec)?;
    write_design_csv(&dir.join("design.csv"), spec, &txs.iter().collect::<Vec<_>>())?;
    for (tx, r) in txs.iter().zip(&results) {
        let vdir = dir.join(&tx.variant.name);
        write_sweep_csv(&vdir.join("sweep.csv"), std::slice::from_ref(&r.report))?;
        write_blocks_csv(&vdir, &r.report.blocks)?;
    }
    Ok(spec.variants.iter().cloned().zip(results).collect())
}

/// One row of a blocklength sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BlocklengthRow {
    pub n: usize,
    pub variant: String,
    pub v: usize,
    pub k: Option<usize>,
    pub mean_edi_db: f64,
    /// Best launch power's measurements, when simulated.
    pub simulated: Option<MetricReport>,
}

/// Channel-free mean EDI for every blocklength and variant, plus a channel
/// simulation at the best launch power for the selected blocklengths.
pub fn run_blocklength_sweep(spec: &ExperimentSpec) -> Result<Vec<BlocklengthRow>> {
    ensure_valid(&validate_config(spec))?;
    let jobs: Vec<(usize, usize)> =
        spec.sweep.blocklengths.iter().flat_map(|&n| (0..spec.variants.len()).map(move |v| (n, v))).collect();
    jobs.par_iter()
        .map(|&(n, vi)| {
            let variant = &spec.variants[vi];
            let tx = Transmitter::new(&spec.shaper, variant, n, spec.seed)?;
            let mean_edi_db = tx.mean_edi_db(spec.seed, spec.sweep.edi_blocks)?;
            let simulate = spec.sweep.simulate_blocklengths.as_ref().is_none_or(|s| s.contains(&n));
            let simulated = if simulate {
                let mut best: Option<MetricReport> = None;
                for &p in &spec.sweep.launch_dbm {
                    let r = simulate_point(spec, &tx, &spec.fiber, p, None)?.report;
                    if best.as_ref().is_none_or(|b| r.effective_snr_db > b.effective_snr_db) {
                        best = Some(r);
                    }
                }
                best
            } else {
                None
            };
            Ok(BlocklengthRow {
                n,
                variant: variant.name.clone(),
                v: variant.v,
                k: tx.design().map(|d| d.rate.k),
                mean_edi_db,
                simulated,
            })
        })
        .collect()
}

pub fn write_blocklength_sweep(dir: &Path, spec: &ExperimentSpec, rows: &[BlocklengthRow]) -> Result<()> {
    write_spec(dir, spec)?;
    let mut out = create(&dir.join("blocklength.csv"))?;
    writeln!(out, "{BLOCKLENGTH_HEADER}")?;
    for r in rows {
        let k = r.k.map(|k| k.to_string()).unwrap_or_default();
        let sim = match &r.simulated {
            Some(m) => format!(
                "{},{},{},{}",
                fmt_csv(m.launch_dbm),
                fmt_csv(m.effective_snr_db),
                fmt_csv(m.air_bit4d),
                fmt_csv(m.pre_fec_ber)
            ),
            None => ",,,".to_string(),
        };
        writeln!(out, "{},{},{},{k},{},{sim}", r.n, r.variant, r.v, fmt_csv(r.mean_edi_db))?;
    }
    out.flush()?;
    Ok(())
}

/// Mean EDI versus flipping bits for prefix and suffix placement.
pub fn run_flipping_sweep(spec: &ExperimentSpec) -> Result<Vec<pas_core::lccdm::FlipSweepRow>> {
    ensure_valid(&validate_config(spec))?;
    let sweep = FlipSweep {
        alphabet: Composition::odd_alphabet(1 << spec.shaper.amplitude_bits),
        n: spec.shaper.n,
        shaping_rate: spec.shaper.shaping_rate,
        window: spec.shaper.window_for(spec.shaper.n),
        blocks: spec.sweep.edi_blocks,
        seed: domain_seed(spec.seed, DOMAIN_EDI),
    };
    let rows = spec
        .sweep
        .flip_v
        .par_iter()
        .map(|&v| prefix_suffix_sweep(&sweep, [v]).map(|mut r| r.remove(0)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(rows)
}

pub fn write_flipping_sweep(dir: &Path, spec: &ExperimentSpec, rows: &[pas_core::lccdm::FlipSweepRow]) -> Result<()> {
    write_spec(dir, spec)?;
    let mut out = create(&dir.join("flipping.csv"))?;
    writeln!(out, "{FLIPPING_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.v, fmt_csv(r.prefix_db), fmt_csv(r.suffix_db))?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a distance sweep: the launch power with the highest AIR.
#[derive(Debug, Clone, PartialEq)]
pub struct ReachRow {
    pub variant: String,
    pub rate_bit4d: f64,
    pub spans: usize,
    pub distance_km: f64,
    pub report: MetricReport,
}

pub fn run_distance_sweep(spec: &ExperimentSpec) -> Result<Vec<ReachRow>> {
    ensure_valid(&validate_config(spec))?;
    let txs = transmitters(spec, spec.shaper.n)?;
    let jobs: Vec<(usize, usize)> =
        (0..txs.len()).flat_map(|v| spec.sweep.spans.iter().map(move |&s| (v, s))).collect();
    jobs.par_iter()
        .map(|&(vi, spans)| {
            let tx = &txs[vi];
            let link = FiberLink { num_spans: spans, ..spec.fiber.clone() };
            let mut best: Option<MetricReport> = None;
            for &p in &spec.sweep.launch_dbm {
                let r = simulate_point(spec, tx, &link, p, None)?.report;
                if best.as_ref().is_none_or(|b| r.air_bit4d > b.air_bit4d) {
                    best = Some(r);
                }
            }
            Ok(ReachRow {
                variant: tx.variant.name.clone(),
                rate_bit4d: tx.total_rate(&spec.shaper),
                spans,
                distance_km: link.total_length_km(),
                report: best.expect("launch list validated non-empty"),
            })
        })
        .collect()
}

pub fn write_distance_sweep(dir: &Path, spec: &ExperimentSpec, rows: &[ReachRow]) -> Result<()> {
    write_spec(dir, spec)?;
    let txs = transmitters(spec, spec.shaper.n)?;
    write_design_csv(&dir.join("design.csv"), spec, &txs.iter().collect::<Vec<_>>())?;
    let mut out = create(&dir.join("reach.csv"))?;
    writeln!(out, "{REACH_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.variant,
            fmt_csv(r.rate_bit4d),
            r.spans,
            fmt_csv(r.distance_km),
            sweep_row(&r.report)
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Runs the sweep named in the spec and writes its artifacts under `dir`.
pub fn run_sweep(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    match spec.sweep.kind {
        SweepKind::Power => write_power_sweep(dir, spec, &run_power_sweep(spec)?),
        SweepKind::Blocklength => write_blocklength_sweep(dir, spec, &run_blocklength_sweep(spec)?),
        SweepKind::Flipping => write_flipping_sweep(dir, spec, &run_flipping_sweep(spec)?),
        SweepKind::Distance => write_distance_sweep(dir, spec, &run_distance_sweep(spec)?),
    }
}
