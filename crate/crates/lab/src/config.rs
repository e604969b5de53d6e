//! Experiment specification: one TOML document plus `key=value` overrides.
//!
//! Unspecified sections fall back to the desk profile (Table-II fiber over
//! 8 spans, 3 channels). The master `seed` has no default.

use std::path::{Path, PathBuf};

use pas_core::FlipPosition;
use pas_fiber::{FiberLink, SimGrid, WdmConfig};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub seed: u64,
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub shaper: ShaperSection,
    #[serde(rename = "variant")]
    pub variants: Vec<Variant>,
    pub fiber: FiberLink,
    pub wdm: WdmConfig,
    pub grid: GridSection,
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShaperSection {
    /// Blocklength.
    pub n: usize,
    /// Information bits per amplitude, `(k - v) / n`.
    pub shaping_rate: f64,
    /// EDI window; 100 for `n >= 600`, else 10, when absent.
    #[serde(default)]
    pub window: Option<usize>,
    pub flip_position: String,
    /// Bits per amplitude label; 3 gives 8 amplitudes (16-PAM, 256QAM).
    pub amplitude_bits: usize,
    /// FEC rate, used for rate bookkeeping only.
    pub code_rate: f64,
}

impl ShaperSection {
    pub fn window_for(&self, n: usize) -> usize {
        self.window.unwrap_or_else(|| pas_core::edi::default_window(n))
    }

    pub fn flip(&self) -> Result<FlipPosition> {
        self.flip_position.parse().map_err(|e: pas_core::Error| LabError::Config(e.to_string()))
    }

    pub fn label_bits(&self) -> usize {
        self.amplitude_bits + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signaling {
    Pas,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub name: String,
    #[serde(default = "default_signaling")]
    pub signaling: Signaling,
    /// Flipping bits; 0 is plain CCDM.
    #[serde(default)]
    pub v: usize,
    #[serde(default)]
    pub shaping_rate: Option<f64>,
    #[serde(default)]
    pub code_rate: Option<f64>,
}

fn default_signaling() -> Signaling {
    Signaling::Pas
}

impl Variant {
    pub fn pas(name: &str, v: usize) -> Self {
        Self { name: name.into(), signaling: Signaling::Pas, v, shaping_rate: None, code_rate: None }
    }

    pub fn shaping_rate(&self, shaper: &ShaperSection) -> f64 {
        self.shaping_rate.unwrap_or(shaper.shaping_rate)
    }

    pub fn code_rate(&self, shaper: &ShaperSection) -> f64 {
        self.code_rate.unwrap_or(shaper.code_rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub channel_samples_per_symbol: usize,
    #[serde(default)]
    pub samples_per_symbol: Option<usize>,
    /// Fixed number of shaping blocks per channel and run. When absent the
    /// smallest count reaching `min_symbols_per_channel` with an integer
    /// number of DFT bins per channel spacing is used.
    #[serde(default)]
    pub blocks_per_run: Option<usize>,
    pub min_symbols_per_channel: usize,
    pub step_km: f64,
    pub max_nonlinear_phase: f64,
    pub abort_on_instability: bool,
    pub dump_waveforms: bool,
}

impl GridSection {
    /// Simulation grid for blocklength `n`.
    pub fn sim_grid(&self, n: usize, wdm: &WdmConfig) -> Result<SimGrid> {
        let mut grid = SimGrid {
            channel_samples_per_symbol: self.channel_samples_per_symbol,
            samples_per_symbol: self.samples_per_symbol,
            symbols_per_block: n,
            blocks_per_run: 1,
            step_km: self.step_km,
            max_nonlinear_phase: self.max_nonlinear_phase,
        };
        if let Some(b) = self.blocks_per_run {
            grid.blocks_per_run = b;
            return Ok(grid);
        }
        grid.blocks_per_run = self.min_symbols_per_channel.div_ceil(n).max(1);
        for _ in 0..4096 {
            if grid.validate(wdm).is_ok() {
                return Ok(grid);
            }
            grid.blocks_per_run += 1;
        }
        Err(LabError::Config(format!("no block count for n = {n} gives an integer channel spacing in DFT bins")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Power,
    Blocklength,
    Flipping,
    Distance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Noise {
    Ase,
    Noiseless,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub kind: SweepKind,
    /// Per-channel launch powers; `simulate` uses the first.
    pub launch_dbm: Vec<f64>,
    pub blocklengths: Vec<usize>,
    /// Blocklengths that also get a channel simulation; all when absent.
    #[serde(default)]
    pub simulate_blocklengths: Option<Vec<usize>>,
    pub flip_v: Vec<usize>,
    /// Blocks averaged in channel-free EDI measurements.
    pub edi_blocks: usize,
    pub spans: Vec<usize>,
    pub noise: Noise,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            name: String::new(),
            description: String::new(),
            output_dir: None,
            shaper: ShaperSection {
                n: 1800,
                shaping_rate: 2.4,
                window: None,
                flip_position: "prefix".into(),
                amplitude_bits: 3,
                code_rate: 0.8,
            },
            variants: vec![Variant::pas("ccdm", 0), Variant::pas("lccdm-v4", 4)],
            fiber: FiberLink::ssmf(8),
            wdm: WdmConfig::standard(3),
            grid: GridSection {
                channel_samples_per_symbol: 2,
                samples_per_symbol: None,
                blocks_per_run: None,
                min_symbols_per_channel: 20_000,
                step_km: 1.0,
                max_nonlinear_phase: 0.05,
                abort_on_instability: false,
                dump_waveforms: false,
            },
            sweep: SweepSection {
                kind: SweepKind::Power,
                launch_dbm: vec![0.0],
                blocklengths: vec![1800],
                simulate_blocklengths: None,
                flip_v: (0..=4).collect(),
                edi_blocks: 1000,
                spans: vec![8],
                noise: Noise::Ase,
            },
        }
    }
}

/// Recursively overlays `over` onto `base`. Tables merge key by key; any
/// other value, arrays included, replaces.
fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Parses the right-hand side of `--set` as a TOML value, falling back to a
/// bare string.
fn parse_value(raw: &str) -> Value {
    match format!("x = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("x").expect("key present"),
        Err(_) => Value::String(raw.to_string()),
    }
}

/// Applies `a.b.c=value`. Numeric segments index into arrays.
pub fn apply_override(doc: &mut Table, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| LabError::Config(format!("override `{assignment}` is not key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(LabError::Config(format!("bad override key `{path}`")));
    }
    let value = parse_value(raw.trim());
    let mut cur: &mut Value = doc
        .entry(keys[0].to_string())
        .or_insert_with(|| if keys.len() > 1 { Value::Table(Table::new()) } else { Value::Boolean(false) });
    for key in &keys[1..] {
        cur = match cur {
            Value::Table(t) => t.entry(key.to_string()).or_insert_with(|| Value::Table(Table::new())),
            Value::Array(a) => {
                let i: usize = key.parse().map_err(|_| LabError::Config(format!("`{key}` in `{path}` must index an array")))?;
                let len = a.len();
                a.get_mut(i).ok_or_else(|| LabError::Config(format!("index {i} out of range in `{path}` ({len} entries)")))?
            }
            _ => return Err(LabError::Config(format!("`{path}` descends into a scalar"))),
        };
    }
    *cur = value;
    Ok(())
}

impl ExperimentSpec {
    /// Parses `text` over the defaults and applies overrides in order.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let user: Table = text.parse().map_err(|e: toml::de::Error| LabError::Config(e.to_string()))?;
        let mut doc = match Value::try_from(ExperimentSpec::default()).expect("defaults serialize") {
            Value::Table(t) => t,
            _ => unreachable!("spec serializes to a table"),
        };
        doc.remove("seed");
        if user.contains_key("variant") {
            doc.remove("variant");
        }
        merge(&mut doc, user);
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        if !doc.contains_key("seed") {
            return Err(LabError::Config("missing mandatory `seed`".into()));
        }
        Value::Table(doc).try_into().map_err(|e: toml::de::Error| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn variant(&self, name: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.name == name)
    }

    /// Output directory: the `PASLAB_OUTPUT_DIR` environment variable, then
    /// the spec, then `out/<name>`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        if let Some(dir) = std::env::var_os("PASLAB_OUTPUT_DIR") {
            return PathBuf::from(dir);
        }
        self.output_dir.clone().unwrap_or_else(|| {
            let name = if self.name.is_empty() { "run" } else { &self.name };
            PathBuf::from("out").join(name)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory() {
        assert!(matches!(ExperimentSpec::from_toml_str("", &[]), Err(LabError::Config(_))));
        let s = ExperimentSpec::from_toml_str("seed = 5", &[]).unwrap();
        assert_eq!(s.seed, 5);
        assert_eq!(s.shaper.n, 1800);
        assert_eq!(s.fiber.num_spans, 8);
        let s = ExperimentSpec::from_toml_str("", &["seed=9".into()]).unwrap();
        assert_eq!(s.seed, 9);
    }

    #[test]
    fn partial_sections_and_overrides() {
        let text = "seed = 1\n[fiber]\nnum_spans = 20\n[[variant]]\nname = \"u\"\nsignaling = \"uniform\"\n";
        let s = ExperimentSpec::from_toml_str(
            text,
            &["shaper.n=900".into(), "sweep.launch_dbm=[-1.0, 2.5]".into(), "variant.0.code_rate=0.6".into(), "shaper.flip_position=suffix".into()],
        )
        .unwrap();
        assert_eq!(s.fiber.num_spans, 20);
        assert_eq!(s.fiber.gamma_per_w_km, 1.37);
        assert_eq!(s.shaper.n, 900);
        assert_eq!(s.sweep.launch_dbm, vec![-1.0, 2.5]);
        assert_eq!(s.variants.len(), 1);
        assert_eq!(s.variants[0].signaling, Signaling::Uniform);
        assert_eq!(s.variants[0].code_rate, Some(0.6));
        assert_eq!(s.shaper.flip().unwrap(), FlipPosition::Suffix);
    }

    #[test]
    fn unknown_keys_and_bad_overrides_fail() {
        assert!(ExperimentSpec::from_toml_str("seed = 1\n[fiber]\nspans = 3\n", &[]).is_err());
        assert!(ExperimentSpec::from_toml_str("seed = 1", &["shaper.n".into()]).is_err());
        assert!(ExperimentSpec::from_toml_str("seed = 1", &["variant.7.v=1".into()]).is_err());
        assert!(ExperimentSpec::from_toml_str("seed = 1", &["shaper.n=\"x\"".into()]).is_err());
    }

    #[test]
    fn round_trip_through_text() {
        let s = ExperimentSpec::from_toml_str("seed = 3", &[]).unwrap();
        let again = ExperimentSpec::from_toml_str(&s.to_toml_string(), &[]).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn automatic_block_count() {
        let s = ExperimentSpec::from_toml_str("seed = 3", &[]).unwrap();
        let g = s.grid.sim_grid(1800, &s.wdm).unwrap();
        assert_eq!(g.blocks_per_run, 12);
        let g = s.grid.sim_grid(180, &s.wdm).unwrap();
        assert_eq!(g.symbols_per_run() % 16, 0);
        assert!(g.symbols_per_run() >= 20_000);
    }
}
