//! Named experiment presets shipped with the crate. `*-desk` presets run on
//! a workstation; `*-full` presets follow the full link and take hours.

use crate::config::ExperimentSpec;
use crate::error::{LabError, Result};

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../presets/", $name, ".toml")))),*]
    };
}

pub const PRESETS: &[(&str, &str)] = presets!(
    "fig2c-desk",
    "fig2c-full",
    "fig3a-desk",
    "fig3a-full",
    "fig3b-desk",
    "fig3b-full",
    "fig3c-desk",
    "fig3c-full",
    "fig3d-desk",
    "fig3d-full",
    "fig5a-desk",
    "fig5a-full",
    "fig5b-desk",
    "fig5b-full",
    "fig6-desk",
    "fig6-full",
);

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn load_preset(name: &str, overrides: &[String]) -> Result<ExperimentSpec> {
    let text = preset_text(name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
        LabError::Config(format!("unknown preset `{name}`; available: {}", names.join(", ")))
    })?;
    ExperimentSpec::from_toml_str(text, overrides)
}
