//! End-to-end link simulation.

use std::path::PathBuf;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::checkpoint::write_waveform;
use crate::edfa::Edfa;
use crate::error::{FiberError, Result};
use crate::link::{FiberLink, SimGrid, WdmConfig};
use crate::receiver::{ReceivedChannel, Receiver};
use crate::ssfm::{Propagator, SpanParams, StepPolicy};
use crate::wdm::{channel_waveform, dbm_to_watt, set_power, wdm_mux};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    Ase,
    Noiseless,
}

#[derive(Debug, Clone)]
pub struct SimOutput {
    pub received: ReceivedChannel,
    pub max_nonlinear_phase: f64,
}

#[derive(Debug, Clone)]
pub struct LinkSimulator {
    pub link: FiberLink,
    pub wdm: WdmConfig,
    pub grid: SimGrid,
    pub abort_on_instability: bool,
    pub checkpoint_dir: Option<PathBuf>,
}

impl LinkSimulator {
    pub fn new(link: FiberLink, wdm: WdmConfig, grid: SimGrid) -> Result<Self> {
        link.validate()?;
        wdm.validate()?;
        grid.validate(&wdm)?;
        Ok(Self { link, wdm, grid, abort_on_instability: false, checkpoint_dir: None })
    }

    pub fn step_policy(&self) -> StepPolicy {
        StepPolicy {
            step_km: self.grid.step_km,
            max_nonlinear_phase: self.grid.max_nonlinear_phase,
            abort_on_violation: self.abort_on_instability,
        }
    }

    /// Launched aggregate field for per-channel unit-energy symbol streams,
    /// channel `c` at offset `c - N_ch/2`.
    pub fn launch(&self, channel_symbols: &[Vec<Complex64>], launch_dbm: f64) -> Result<Vec<Complex64>> {
        if channel_symbols.len() != self.wdm.num_channels {
            return Err(FiberError::LengthMismatch { expected: self.wdm.num_channels, got: channel_symbols.len() });
        }
        let per_channel = dbm_to_watt(launch_dbm);
        let expected = self.grid.symbols_per_run();
        let mut waves = Vec::with_capacity(channel_symbols.len());
        for s in channel_symbols {
            if s.len() != expected {
                return Err(FiberError::LengthMismatch { expected, got: s.len() });
            }
            let mut w = channel_waveform(s, &self.wdm, &self.grid);
            set_power(&mut w, per_channel);
            waves.push(w);
        }
        wdm_mux(&waves, &self.wdm, self.grid.sample_rate_hz(&self.wdm))
    }

    /// Propagates the launched field over all spans. ASE of span `s` is
    /// drawn from ChaCha20 stream `s` of `seed`.
    pub fn propagate(&self, field: &mut [Complex64], noise: NoiseMode, seed: u64) -> Result<f64> {
        let fs = self.grid.sample_rate_hz(&self.wdm);
        let mut prop = Propagator::new(field.len(), fs);
        let span = SpanParams::from_link(&self.link);
        let policy = self.step_policy();
        let edfa = Edfa {
            gain_db: self.link.span_loss_db(),
            noise_figure_db: (noise == NoiseMode::Ase).then_some(self.link.edfa_noise_figure_db),
        };
        let carrier = self.link.carrier_frequency_hz();
        let mut max_phase = 0.0f64;
        for s in 0..self.link.num_spans {
            let report = prop.span(field, &span, &policy)?;
            max_phase = max_phase.max(report.max_nonlinear_phase);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            edfa.apply(field, fs, carrier, &mut rng);
        }
        if max_phase > policy.max_nonlinear_phase {
            log::warn!(
                "per-step nonlinear phase reached {max_phase:.4} rad, above {:.4} rad; consider a smaller step",
                policy.max_nonlinear_phase
            );
        }
        Ok(max_phase)
    }

    /// Full run; returns the center channel at symbol rate.
    pub fn simulate(
        &self,
        channel_symbols: &[Vec<Complex64>],
        launch_dbm: f64,
        noise: NoiseMode,
        seed: u64,
    ) -> Result<SimOutput> {
        let mut field = self.launch(channel_symbols, launch_dbm)?;
        self.dump("launch", &field)?;
        let max_nonlinear_phase = self.propagate(&mut field, noise, seed)?;
        self.dump("received", &field)?;
        let center = self.wdm.center_index();
        let received = Receiver::for_link(&self.link, &self.wdm, &self.grid).receive(
            &field,
            center,
            &channel_symbols[center],
        )?;
        Ok(SimOutput { received, max_nonlinear_phase })
    }

    fn dump(&self, name: &str, field: &[Complex64]) -> Result<()> {
        if let Some(dir) = &self.checkpoint_dir {
            std::fs::create_dir_all(dir)?;
            let f = std::fs::File::create(dir.join(format!("{name}.cw64")))?;
            write_waveform(std::io::BufWriter::new(f), field)?;
        }
        Ok(())
    }
}
