use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pas_core::edi::{default_window, edi_estimate};
use pas_core::{AmplitudeBlock, BitBlock, EdiValue};
use pas_lab::chain::Transmitter;
use pas_lab::config::{Signaling, Variant};
use pas_lab::error::{LabError, Result};
use pas_lab::experiment::{run_simulation, run_sweep};
use pas_lab::io;
use pas_lab::presets::{load_preset, PRESETS};
use pas_lab::validate::validate_config;
use pas_lab::ExperimentSpec;

#[derive(Parser)]
#[command(name = "paslab", version, about = "Probabilistic amplitude shaping laboratory")]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SpecArgs {
    /// TOML experiment file.
    #[arg(short, long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name, e.g. fig3a-desk.
    #[arg(short, long)]
    preset: Option<String>,
    /// Override a field, e.g. --set shaper.n=900 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl SpecArgs {
    fn load(&self) -> Result<ExperimentSpec> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentSpec::load(path, &self.set),
            (None, Some(name)) => load_preset(name, &self.set),
            (None, None) => Err(LabError::Config("pass --config FILE or --preset NAME".into())),
        }
    }
}

#[derive(Args, Clone)]
struct ShaperArgs {
    /// Variant to use; the first shaped variant by default.
    #[arg(long)]
    variant: Option<String>,
    /// Flipping bits, overriding the variant.
    #[arg(long)]
    v: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the rate-matched composition and rates of each shaped variant.
    Design {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        shaper: ShaperArgs,
    },
    /// Bit blocks to amplitude blocks (and optionally symbols).
    Shape {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        shaper: ShaperArgs,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Candidate selection per block, written when v > 0.
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Framed QAM symbols with seeded sign bits.
        #[arg(long)]
        symbols: Option<PathBuf>,
    },
    /// Amplitude blocks back to bit blocks.
    Deshape {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        shaper: ShaperArgs,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Energy dispersion index of each block of a symbol or amplitude file.
    Edi {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Symbols)]
        format: Format,
        /// Even window length; 100 for blocks of 600 or more, else 10.
        #[arg(short, long)]
        window: Option<usize>,
        /// Symbols per block; the whole file when absent.
        #[arg(long)]
        block_len: Option<usize>,
        /// CSV destination; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// One launch power for every variant.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, allow_hyphen_values = true)]
        launch_dbm: Option<f64>,
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
    /// Run the sweep described by the spec.
    Sweep {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(short, long)]
        output_dir: Option<PathBuf>,
    },
    /// Check a spec; prints `field<TAB>message` per problem.
    Validate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Also print the resolved spec.
        #[arg(long)]
        print: bool,
        /// List built-in presets and exit.
        #[arg(long)]
        list_presets: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// CSV `re,im` rows.
    Symbols,
    /// One block per line of whitespace-separated amplitudes.
    Amplitudes,
}

fn pick_variant(spec: &ExperimentSpec, args: &ShaperArgs) -> Result<Variant> {
    let mut variant = match &args.variant {
        Some(name) => spec.variant(name).cloned().ok_or_else(|| LabError::Config(format!("no variant `{name}`")))?,
        None => spec
            .variants
            .iter()
            .find(|v| v.signaling == Signaling::Pas)
            .cloned()
            .unwrap_or_else(|| Variant::pas("shaper", 0)),
    };
    if variant.signaling != Signaling::Pas {
        return Err(LabError::Config(format!("variant `{}` is not shaped", variant.name)));
    }
    if let Some(v) = args.v {
        variant.v = v;
    }
    Ok(variant)
}

fn transmitter(spec: &ExperimentSpec, args: &ShaperArgs) -> Result<Transmitter> {
    let variant = pick_variant(spec, args)?;
    Transmitter::new(&spec.shaper, &variant, spec.shaper.n, spec.seed)
}

fn design(spec: &ExperimentSpec, args: &ShaperArgs) -> Result<()> {
    let variants: Vec<Variant> = if args.variant.is_some() || args.v.is_some() {
        vec![pick_variant(spec, args)?]
    } else {
        spec.variants.iter().filter(|v| v.signaling == Signaling::Pas).cloned().collect()
    };
    let mut out = std::io::stdout().lock();
    for variant in variants {
        let tx = Transmitter::new(&spec.shaper, &variant, spec.shaper.n, spec.seed)?;
        let d = tx.design().expect("shaped variant");
        writeln!(out, "[{}]", variant.name)?;
        writeln!(out, "n = {}", d.rate.n)?;
        writeln!(out, "k = {}", d.rate.k)?;
        writeln!(out, "v = {}", d.rate.v)?;
        writeln!(out, "shaping_rate = {}", d.rate.shaping_rate())?;
        writeln!(out, "alphabet = {:?}", d.composition.alphabet())?;
        writeln!(out, "composition = {:?}", d.composition.counts())?;
        writeln!(out, "lambda = {}", d.lambda)?;
        writeln!(out, "mb_entropy = {}", d.mb_entropy)?;
        writeln!(out, "composition_entropy = {}", d.composition.entropy_bits())?;
        writeln!(out, "rate_loss_list = {}", d.rate_loss_list)?;
        writeln!(out, "total_rate_bit4d = {}", tx.total_rate(&spec.shaper))?;
        writeln!(out)?;
    }
    Ok(())
}

fn shape(
    spec: &ExperimentSpec,
    args: &ShaperArgs,
    input: &Path,
    output: &Path,
    sidecar: Option<&Path>,
    symbols: Option<&Path>,
) -> Result<()> {
    let tx = transmitter(spec, args)?;
    let lccdm = tx.lccdm().expect("shaped variant");
    let v = lccdm.config().v;
    let bits = io::read_bit_blocks(io::open(input)?)?;
    let mut amps: Vec<AmplitudeBlock> = Vec::new();
    let mut selections = Vec::new();
    if v == 0 {
        // One CCDM input of k bits per line, one amplitude block out.
        for b in &bits {
            amps.push(lccdm.ccdm().encode(b)?);
        }
    } else {
        // One line carries the I then the Q information bits of a block.
        let info = lccdm.config().info_bits();
        for (i, b) in bits.iter().enumerate() {
            if b.len() != 2 * info {
                return Err(LabError::Config(format!("bit block {i} has {} bits, expected {}", b.len(), 2 * info)));
            }
            let out = lccdm.encode(&b.slice(0..info), &b.slice(info..2 * info))?;
            selections.push((out.selected, out.edi));
            amps.push(out.a_i);
            amps.push(out.a_q);
        }
    }
    io::write_amplitude_blocks(io::create(output)?, &amps)?;
    if let Some(path) = sidecar {
        if v == 0 {
            log::warn!("no candidate selection without flipping bits; sidecar not written");
        } else {
            io::write_selection_csv(io::create(path)?, &selections)?;
        }
    }
    if let Some(path) = symbols {
        if amps.len() % 2 != 0 {
            return Err(LabError::Config("framing needs an even number of amplitude blocks (I, Q pairs)".into()));
        }
        let mut all = Vec::new();
        for (b, pair) in amps.chunks(2).enumerate() {
            all.extend(tx.frame(&pair[0], &pair[1], 0, b)?.symbols);
        }
        io::write_symbols(io::create(path)?, &all)?;
    }
    Ok(())
}

fn deshape(spec: &ExperimentSpec, args: &ShaperArgs, input: &Path, output: &Path) -> Result<()> {
    let tx = transmitter(spec, args)?;
    let lccdm = tx.lccdm().expect("shaped variant");
    let amps = io::read_amplitude_blocks(io::open(input)?)?;
    let bits: Vec<BitBlock> = if lccdm.config().v == 0 {
        amps.iter().map(|a| lccdm.ccdm().decode(a)).collect::<std::result::Result<_, _>>()?
    } else {
        if amps.len() % 2 != 0 {
            return Err(LabError::Config("expected I and Q amplitude lines in pairs".into()));
        }
        amps.chunks(2)
            .map(|p| lccdm.decode(&p[0], &p[1]).map(|(i, q)| i.concat(&q)))
            .collect::<std::result::Result<_, _>>()?
    };
    io::write_bit_blocks(io::create(output)?, &bits)?;
    Ok(())
}

fn edi(input: &Path, format: Format, window: Option<usize>, block_len: Option<usize>, output: Option<&Path>) -> Result<()> {
    let blocks: Vec<Vec<num_complex::Complex64>> = match format {
        Format::Symbols => {
            let s = io::read_symbols(io::open(input)?)?;
            let len = block_len.unwrap_or(s.len());
            if len == 0 || s.len() % len != 0 {
                return Err(LabError::Config(format!("{} symbols do not split into blocks of {len}", s.len())));
            }
            s.chunks(len).map(|c| c.to_vec()).collect()
        }
        Format::Amplitudes => io::read_amplitude_blocks(io::open(input)?)?
            .iter()
            .map(|a| a.as_slice().iter().map(|&x| num_complex::Complex64::new(x as f64, 0.0)).collect())
            .collect(),
    };
    let values: Vec<EdiValue> = blocks
        .iter()
        .map(|b| edi_estimate(b, window.unwrap_or_else(|| default_window(b.len()))))
        .collect::<std::result::Result<_, _>>()?;
    match output {
        Some(p) => io::write_edi_csv(io::create(p)?, &values),
        None => io::write_edi_csv(std::io::stdout().lock(), &values),
    }
}

fn output_dir(spec: &ExperimentSpec, cli: Option<PathBuf>) -> PathBuf {
    cli.unwrap_or_else(|| spec.resolved_output_dir())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Design { spec, shaper } => design(&spec.load()?, &shaper),
        Command::Shape { spec, shaper, input, output, sidecar, symbols } => {
            shape(&spec.load()?, &shaper, &input, &output, sidecar.as_deref(), symbols.as_deref())
        }
        Command::Deshape { spec, shaper, input, output } => deshape(&spec.load()?, &shaper, &input, &output),
        Command::Edi { input, format, window, block_len, output } => {
            edi(&input, format, window, block_len, output.as_deref())
        }
        Command::Simulate { spec, launch_dbm, output_dir: dir } => {
            let spec = spec.load()?;
            let dir = output_dir(&spec, dir);
            for (variant, r) in run_simulation(&spec, launch_dbm, &dir)? {
                println!(
                    "{}: launch {} dBm, SNR {:.3} dB, AIR {:.4} bit/4D, BER {:.3e}, EDI {:.3} dB",
                    variant.name,
                    r.report.launch_dbm,
                    r.report.effective_snr_db,
                    r.report.air_bit4d,
                    r.report.pre_fec_ber,
                    r.report.mean_edi_db
                );
            }
            println!("wrote {}", dir.display());
            Ok(())
        }
        Command::Sweep { spec, output_dir: dir } => {
            let spec = spec.load()?;
            let dir = output_dir(&spec, dir);
            run_sweep(&spec, &dir)?;
            println!("wrote {}", dir.display());
            Ok(())
        }
        Command::Validate { spec, print, list_presets } => {
            if list_presets {
                for (name, text) in PRESETS {
                    let desc = ExperimentSpec::from_toml_str(text, &[]).map(|s| s.description).unwrap_or_default();
                    println!("{name}\t{desc}");
                }
                return Ok(());
            }
            let spec = spec.load()?;
            let issues = validate_config(&spec);
            for i in &issues {
                println!("{i}");
            }
            if print {
                print!("{}", spec.to_toml_string());
            }
            if issues.is_empty() {
                Ok(())
            } else {
                Err(LabError::Config(format!("{} problem(s) found", issues.len())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(n) = std::env::var("PASLAB_WORKERS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("worker pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
