//! Physical-layer parameters.

use serde::{Deserialize, Serialize};

use crate::error::{FiberError, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Guard factor on the WDM band the aggregate grid must cover.
pub const BAND_GUARD: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberLink {
    pub span_length_km: f64,
    pub num_spans: usize,
    pub attenuation_db_per_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub gamma_per_w_km: f64,
    pub center_wavelength_nm: f64,
    pub edfa_noise_figure_db: f64,
}

impl FiberLink {
    /// Standard single-mode fiber with 80 km spans.
    pub fn ssmf(num_spans: usize) -> Self {
        Self {
            span_length_km: 80.0,
            num_spans,
            attenuation_db_per_km: 0.2,
            dispersion_ps_nm_km: 17.0,
            gamma_per_w_km: 1.37,
            center_wavelength_nm: 1550.0,
            edfa_noise_figure_db: 6.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("span_length_km", self.span_length_km),
            ("center_wavelength_nm", self.center_wavelength_nm),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(FiberError::InvalidParameter(format!("{name} must be positive")));
            }
        }
        for (name, v) in [
            ("attenuation_db_per_km", self.attenuation_db_per_km),
            ("dispersion_ps_nm_km", self.dispersion_ps_nm_km),
            ("gamma_per_w_km", self.gamma_per_w_km),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(FiberError::InvalidParameter(format!("{name} must be non-negative")));
            }
        }
        if self.num_spans == 0 {
            return Err(FiberError::InvalidParameter("num_spans must be at least 1".into()));
        }
        Ok(())
    }

    pub fn total_length_km(&self) -> f64 {
        self.span_length_km * self.num_spans as f64
    }

    /// Power attenuation coefficient in 1/km.
    pub fn alpha_per_km(&self) -> f64 {
        self.attenuation_db_per_km * std::f64::consts::LN_10 / 10.0
    }

    pub fn span_loss_db(&self) -> f64 {
        self.attenuation_db_per_km * self.span_length_km
    }

    /// `beta2 = -D lambda^2 / (2 pi c)` in s^2/km.
    pub fn beta2_s2_per_km(&self) -> f64 {
        let d = self.dispersion_ps_nm_km * 1e-12 / 1e-9; // s/m per km
        let lambda = self.center_wavelength_nm * 1e-9;
        -d * lambda * lambda / (2.0 * std::f64::consts::PI * SPEED_OF_LIGHT)
    }

    pub fn carrier_frequency_hz(&self) -> f64 {
        SPEED_OF_LIGHT / (self.center_wavelength_nm * 1e-9)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WdmConfig {
    /// Odd; the channel of interest sits in the middle.
    pub num_channels: usize,
    pub channel_spacing_ghz: f64,
    pub symbol_rate_gbd: f64,
    pub rrc_rolloff: f64,
}

impl WdmConfig {
    pub fn standard(num_channels: usize) -> Self {
        Self { num_channels, channel_spacing_ghz: 50.0, symbol_rate_gbd: 32.0, rrc_rolloff: 0.1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_channels == 0 || self.num_channels % 2 == 0 {
            return Err(FiberError::InvalidParameter("num_channels must be odd".into()));
        }
        if !(self.rrc_rolloff > 0.0 && self.rrc_rolloff <= 1.0) {
            return Err(FiberError::InvalidParameter("rrc_rolloff must lie in (0, 1]".into()));
        }
        if !(self.symbol_rate_gbd > 0.0) || !(self.channel_spacing_ghz > 0.0) {
            return Err(FiberError::InvalidParameter("rates must be positive".into()));
        }
        if self.num_channels > 1 && self.channel_spacing_ghz < self.symbol_rate_gbd * (1.0 + self.rrc_rolloff) {
            return Err(FiberError::InvalidParameter("channels overlap".into()));
        }
        Ok(())
    }

    pub fn symbol_rate_hz(&self) -> f64 {
        self.symbol_rate_gbd * 1e9
    }

    pub fn spacing_hz(&self) -> f64 {
        self.channel_spacing_ghz * 1e9
    }

    /// Offsets `m` of each channel, `-(N-1)/2 ..= (N-1)/2`.
    pub fn channel_offsets(&self) -> impl Iterator<Item = i64> {
        let half = (self.num_channels as i64 - 1) / 2;
        -half..=half
    }

    pub fn center_index(&self) -> usize {
        self.num_channels / 2
    }

    /// Occupied band including roll-off of the outer channels.
    pub fn occupied_bandwidth_hz(&self) -> f64 {
        (self.num_channels as f64 - 1.0) * self.spacing_hz() + self.symbol_rate_hz() * (1.0 + self.rrc_rolloff)
    }
}

fn default_channel_sps() -> usize {
    2
}
fn default_max_phase() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimGrid {
    /// Per-channel oversampling before resampling to the aggregate grid.
    #[serde(default = "default_channel_sps")]
    pub channel_samples_per_symbol: usize,
    /// Aggregate oversampling; derived from the WDM band when absent.
    #[serde(default)]
    pub samples_per_symbol: Option<usize>,
    pub symbols_per_block: usize,
    pub blocks_per_run: usize,
    pub step_km: f64,
    #[serde(default = "default_max_phase")]
    pub max_nonlinear_phase: f64,
}

impl SimGrid {
    pub fn desk(symbols_per_block: usize, blocks_per_run: usize) -> Self {
        Self {
            channel_samples_per_symbol: 2,
            samples_per_symbol: None,
            symbols_per_block,
            blocks_per_run,
            step_km: 1.0,
            max_nonlinear_phase: 0.05,
        }
    }

    pub fn symbols_per_run(&self) -> usize {
        self.symbols_per_block * self.blocks_per_run
    }

    /// Smallest power-of-two multiple of the symbol rate, not below the
    /// per-channel rate, covering `N_ch * spacing * guard`.
    pub fn aggregate_sps(&self, wdm: &WdmConfig) -> usize {
        if let Some(sps) = self.samples_per_symbol {
            return sps;
        }
        let need = wdm.num_channels as f64 * wdm.spacing_hz() * BAND_GUARD / wdm.symbol_rate_hz();
        let mut sps = 1usize;
        while (sps as f64) < need || sps < self.channel_samples_per_symbol {
            sps *= 2;
        }
        sps
    }

    pub fn sample_rate_hz(&self, wdm: &WdmConfig) -> f64 {
        self.aggregate_sps(wdm) as f64 * wdm.symbol_rate_hz()
    }

    pub fn num_samples(&self, wdm: &WdmConfig) -> usize {
        self.aggregate_sps(wdm) * self.symbols_per_run()
    }

    pub fn validate(&self, wdm: &WdmConfig) -> Result<()> {
        if self.symbols_per_block == 0 || self.blocks_per_run == 0 {
            return Err(FiberError::InvalidParameter("empty run".into()));
        }
        if !(self.step_km > 0.0) {
            return Err(FiberError::InvalidParameter("step_km must be positive".into()));
        }
        if self.channel_samples_per_symbol < 2 {
            return Err(FiberError::InvalidParameter("need at least 2 samples per symbol per channel".into()));
        }
        let sps = self.aggregate_sps(wdm);
        if sps % self.channel_samples_per_symbol != 0 {
            return Err(FiberError::GridTooNarrow(format!(
                "aggregate oversampling {sps} is not a multiple of the channel oversampling {}",
                self.channel_samples_per_symbol
            )));
        }
        let fs = self.sample_rate_hz(wdm);
        let band = wdm.num_channels as f64 * wdm.spacing_hz() * BAND_GUARD;
        if wdm.num_channels > 1 && fs < band {
            return Err(FiberError::GridTooNarrow(format!(
                "sample rate {:.1} GHz below the guarded WDM band {:.1} GHz",
                fs / 1e9,
                band / 1e9
            )));
        }
        if fs < wdm.occupied_bandwidth_hz() {
            return Err(FiberError::GridTooNarrow("sample rate below occupied bandwidth".into()));
        }
        // Channel offsets must fall on DFT bins so the periodic field stays periodic.
        let bins = wdm.spacing_hz() * self.symbols_per_run() as f64 / wdm.symbol_rate_hz();
        if wdm.num_channels > 1 && (bins - bins.round()).abs() > 1e-9 {
            return Err(FiberError::GridTooNarrow(format!(
                "channel spacing is {bins} DFT bins; choose a symbol count making it an integer"
            )));
        }
        Ok(())
    }
}
