//! Up-front checks of an experiment specification.

use std::fmt;

use pas_core::ccdm::multiset_count;
use pas_core::design::{design_shaper, RateSpec};
use pas_core::Composition;
use pas_fiber::link::BAND_GUARD;

use crate::config::{ExperimentSpec, Signaling, SweepKind};
use crate::error::{LabError, Result};

/// One problem found in a spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Issue {
    /// `field<TAB>message`, one issue per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.field, self.message)
    }
}

struct Report(Vec<Issue>);

impl Report {
    fn push(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Issue { field: field.into(), message: message.into() });
    }
}

/// Blocklengths the spec will shape at.
fn blocklengths(spec: &ExperimentSpec) -> Vec<usize> {
    match spec.sweep.kind {
        SweepKind::Blocklength => spec.sweep.blocklengths.clone(),
        _ => vec![spec.shaper.n],
    }
}

fn needs_channel(spec: &ExperimentSpec) -> bool {
    spec.sweep.kind != SweepKind::Flipping
}

fn check_shaper(spec: &ExperimentSpec, r: &mut Report) {
    let s = &spec.shaper;
    if s.flip().is_err() {
        r.push("shaper.flip_position", format!("`{}` is neither prefix nor suffix", s.flip_position));
    }
    if !(1..=6).contains(&s.amplitude_bits) {
        r.push("shaper.amplitude_bits", "must lie in 1..=6");
        return;
    }
    if !(s.code_rate > 0.0 && s.code_rate <= 1.0) {
        r.push("shaper.code_rate", "must lie in (0, 1]");
    }
    let alphabet = Composition::odd_alphabet(1 << s.amplitude_bits);
    let flip_vs: Vec<usize> = match spec.sweep.kind {
        SweepKind::Flipping => spec.sweep.flip_v.clone(),
        _ => spec.variants.iter().filter(|v| v.signaling == Signaling::Pas).map(|v| v.v).collect(),
    };
    let rates: Vec<f64> = match spec.sweep.kind {
        SweepKind::Flipping => vec![s.shaping_rate],
        _ => spec.variants.iter().filter(|v| v.signaling == Signaling::Pas).map(|v| v.shaping_rate(s)).collect(),
    };
    for n in blocklengths(spec) {
        let w = s.window_for(n);
        if w == 0 || w % 2 != 0 {
            r.push("shaper.window", format!("window {w} must be even and positive"));
        }
        if w >= n {
            r.push("shaper.window", format!("window {w} must be below the blocklength {n}"));
        }
        for (&v, &rs) in flip_vs.iter().zip(rates.iter().cycle()) {
            let field = format!("shaper (n = {n}, v = {v}, R_s = {rs})");
            let rate = match RateSpec::from_shaping_rate(rs, n, v) {
                Ok(rate) => rate,
                Err(e) => {
                    r.push(field, format!("n R_s + v must be an integer: {e}"));
                    continue;
                }
            };
            if v >= rate.k {
                r.push(field.clone(), format!("v = {v} must be below k = {}", rate.k));
            }
            if v > 12 {
                r.push(field.clone(), "at most 12 flipping bits (2^24 candidates) are supported");
            }
            match design_shaper(&alphabet, rs, n, v) {
                Ok(d) => {
                    if multiset_count(&d.composition).bits() <= rate.k as u64 {
                        r.push(field, format!("2^k exceeds the codebook size for k = {}", rate.k));
                    }
                }
                Err(e) => r.push(field, format!("no composition reaches 2^k codewords: {e}")),
            }
        }
    }
}

fn check_variants(spec: &ExperimentSpec, r: &mut Report) {
    if spec.variants.is_empty() && spec.sweep.kind != SweepKind::Flipping {
        r.push("variant", "at least one variant is required");
    }
    for (i, v) in spec.variants.iter().enumerate() {
        let field = format!("variant.{i}");
        if v.name.is_empty() || !v.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            r.push(format!("{field}.name"), format!("`{}` must be non-empty and use only [A-Za-z0-9_-]", v.name));
        }
        if spec.variants[..i].iter().any(|o| o.name == v.name) {
            r.push(format!("{field}.name"), format!("duplicate name `{}`", v.name));
        }
        if let Some(rc) = v.code_rate {
            if !(rc > 0.0 && rc <= 1.0) {
                r.push(format!("{field}.code_rate"), "must lie in (0, 1]");
            }
        }
        if v.signaling == Signaling::Uniform && v.v != 0 {
            r.push(format!("{field}.v"), "uniform signaling has no flipping bits");
        }
    }
}

fn check_channel(spec: &ExperimentSpec, r: &mut Report) {
    if let Err(e) = spec.fiber.validate() {
        r.push("fiber", e.to_string());
    }
    if let Err(e) = spec.wdm.validate() {
        r.push("wdm", e.to_string());
        return;
    }
    let g = &spec.grid;
    if g.channel_samples_per_symbol < 2 {
        r.push("grid.channel_samples_per_symbol", "must be at least 2");
    }
    if !(g.step_km > 0.0) {
        r.push("grid.step_km", "must be positive");
    } else if g.step_km > spec.fiber.span_length_km {
        r.push("grid.step_km", "must not exceed the span length");
    }
    if !(g.max_nonlinear_phase > 0.0) {
        r.push("grid.max_nonlinear_phase", "must be positive");
    }
    if let Some(sps) = g.samples_per_symbol {
        let need = spec.wdm.num_channels as f64 * spec.wdm.spacing_hz() * BAND_GUARD;
        let have = sps as f64 * spec.wdm.symbol_rate_hz();
        if have < need {
            r.push(
                "grid.samples_per_symbol",
                format!("{:.1} GHz grid does not cover the guarded {:.1} GHz band", have / 1e9, need / 1e9),
            );
        }
        if sps % g.channel_samples_per_symbol != 0 {
            r.push("grid.samples_per_symbol", "must be a multiple of channel_samples_per_symbol");
        }
    }
    for n in blocklengths(spec) {
        match g.sim_grid(n, &spec.wdm) {
            Ok(grid) => {
                if let Err(e) = grid.validate(&spec.wdm) {
                    r.push("grid", format!("n = {n}: {e}"));
                }
            }
            Err(e) => r.push("grid", e.to_string()),
        }
    }
    if spec.sweep.launch_dbm.is_empty() {
        r.push("sweep.launch_dbm", "at least one launch power is required");
    }
    if spec.sweep.launch_dbm.iter().any(|p| !p.is_finite()) {
        r.push("sweep.launch_dbm", "launch powers must be finite");
    }
}

fn check_sweep(spec: &ExperimentSpec, r: &mut Report) {
    let s = &spec.sweep;
    match s.kind {
        SweepKind::Blocklength => {
            if s.blocklengths.is_empty() {
                r.push("sweep.blocklengths", "at least one blocklength is required");
            }
            if let Some(sim) = &s.simulate_blocklengths {
                for n in sim.iter().filter(|n| !s.blocklengths.contains(n)) {
                    r.push("sweep.simulate_blocklengths", format!("{n} is not in sweep.blocklengths"));
                }
            }
            if s.edi_blocks == 0 {
                r.push("sweep.edi_blocks", "must be positive");
            }
        }
        SweepKind::Flipping => {
            if s.flip_v.is_empty() {
                r.push("sweep.flip_v", "at least one value is required");
            }
            if s.edi_blocks == 0 {
                r.push("sweep.edi_blocks", "must be positive");
            }
        }
        SweepKind::Distance => {
            if s.spans.is_empty() || s.spans.contains(&0) {
                r.push("sweep.spans", "needs at least one positive span count");
            }
        }
        SweepKind::Power => {}
    }
}

/// All problems with `spec`; empty when it is runnable.
pub fn validate_config(spec: &ExperimentSpec) -> Vec<Issue> {
    let mut r = Report(Vec::new());
    check_variants(spec, &mut r);
    check_sweep(spec, &mut r);
    check_shaper(spec, &mut r);
    if needs_channel(spec) {
        check_channel(spec, &mut r);
    }
    r.0
}

/// Turns a non-empty issue list into a configuration error.
pub fn ensure_valid(issues: &[Issue]) -> Result<()> {
    if issues.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = issues.iter().map(|i| i.to_string()).collect();
    Err(LabError::Config(lines.join("\n")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(overrides: &[&str]) -> ExperimentSpec {
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        ExperimentSpec::from_toml_str("seed = 1", &o).unwrap()
    }

    #[test]
    fn defaults_are_valid() {
        assert_eq!(validate_config(&spec(&[])), vec![]);
    }

    #[test]
    fn window_equal_to_n_is_rejected() {
        let issues = validate_config(&spec(&["shaper.n=100", "shaper.window=100", "shaper.shaping_rate=2.0"]));
        assert!(issues.iter().any(|i| i.field == "shaper.window"), "{issues:?}");
    }

    #[test]
    fn fractional_k_is_rejected_with_reason() {
        let issues = validate_config(&spec(&["shaper.n=1801"]));
        assert!(issues.iter().any(|i| i.message.contains("integer")), "{issues:?}");
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let issues = validate_config(&spec(&["grid.samples_per_symbol=2"]));
        assert!(issues.iter().any(|i| i.field == "grid.samples_per_symbol"), "{issues:?}");
        let issues = validate_config(&spec(&["variant.0.name=\"a b\""]));
        assert_eq!(issues.len(), 1);
        assert!(ensure_valid(&issues).is_err());
    }
}
