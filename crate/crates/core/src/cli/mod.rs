//! Command-line flags.

mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use roisim::analog_sensor::{CircuitParams, ColorMode, SensorConfig};
use roisim::cost_model::{EnergyParams, MemoryMode, DEFAULT_E_ADC};
use roisim::SimError;

pub use commands::run;

#[derive(Debug, Parser)]
#[command(
    name = "roisim",
    version,
    about = "Two-stage in-sensor pooling / ROI pipeline simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the two-stage and baseline sessions on frames.
    Simulate(SimulateArgs),
    /// Evaluate the closed-form costs for one configuration.
    Cost(CostArgs),
    /// Run a sweep spec and write one row per configuration.
    Sweep(SweepArgs),
    /// Cross-check the simulator against the formulas on random configs.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorArg {
    Rgb,
    Gray,
}

impl From<ColorArg> for ColorMode {
    fn from(c: ColorArg) -> Self {
        match c {
            ColorArg::Rgb => ColorMode::Rgb,
            ColorArg::Gray => ColorMode::Gray,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MemoryArg {
    Streamed,
    Batched,
}

#[derive(Debug, Clone, Args)]
pub struct SensorArgs {
    #[arg(long)]
    pub width: Option<u32>,
    #[arg(long)]
    pub height: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub pool_k: u32,
    /// Stage-1 colour mode.
    #[arg(long, value_enum, default_value_t = ColorArg::Rgb)]
    pub color_mode: ColorArg,
    /// Stage-1 channels (1 or 3); overrides --color-mode.
    #[arg(long)]
    pub stage1_channels: Option<u32>,
    #[arg(long, default_value_t = 8)]
    pub adc_bits: u32,
    #[arg(long, default_value_t = 16)]
    pub word_bits: u32,
    #[arg(long, default_value_t = 1.0)]
    pub vdd: f64,
    #[arg(long, default_value_t = 10_000.0)]
    pub resistance: f64,
    /// Relative std-dev of branch resistors in the averaging network.
    #[arg(long, default_value_t = 0.0)]
    pub mismatch_sigma: f64,
}

impl SensorArgs {
    pub fn color(&self) -> Result<ColorMode, SimError> {
        match self.stage1_channels {
            Some(c) => ColorMode::from_channels(c),
            None => Ok(self.color_mode.into()),
        }
    }

    pub fn dims(&self) -> Result<(u32, u32), SimError> {
        match (self.width, self.height) {
            (Some(w), Some(h)) => Ok((w, h)),
            _ => Err(SimError::config("--width and --height are required")),
        }
    }

    /// Configuration for an `n × m` array using these flags.
    pub fn config(&self, n: u32, m: u32, seed: u64) -> Result<SensorConfig, SimError> {
        let mut cfg = SensorConfig::new(n, m, self.pool_k, self.color()?)?;
        cfg.adc_bits = self.adc_bits;
        cfg.word_bits = self.word_bits;
        cfg.vdd = self.vdd;
        cfg.circuit = CircuitParams {
            resistance: self.resistance,
            vth: 0.3 * self.vdd,
            mismatch_sigma: self.mismatch_sigma,
            rng_seed: seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct EnergyArgs {
    /// Joules per ADC conversion.
    #[arg(long, default_value_t = DEFAULT_E_ADC)]
    pub e_adc: f64,
    /// Joules per frame spent by the pooling circuit.
    #[arg(long, default_value_t = 0.0)]
    pub e_pool: f64,
    /// Joules per transferred bit.
    #[arg(long, default_value_t = 0.0)]
    pub e_transfer_bit: f64,
}

impl EnergyArgs {
    pub fn params(&self) -> Result<EnergyParams, SimError> {
        let p = EnergyParams {
            e_adc: self.e_adc,
            e_pool_per_frame: self.e_pool,
            e_transfer_per_bit: self.e_transfer_bit,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sensor: SensorArgs,
    #[command(flatten)]
    pub energy: EnergyArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Generate a synthetic scene instead of reading images.
    #[arg(long)]
    pub synthetic: bool,
    /// PPM (P6) input images.
    #[arg(long = "input", num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// JSON-lines annotations; frames are matched to inputs by file stem.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    /// Synthetic boxes as `JxWxH` (e.g. `16x112x112`) or `0`.
    #[arg(long, default_value = "0")]
    pub boxes: String,
    /// Write the synthetic frame's annotation line here.
    #[arg(long)]
    pub annotations_out: Option<PathBuf>,
    #[arg(long, env = "HIRISE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    #[command(flatten)]
    pub sensor: SensorArgs,
    #[command(flatten)]
    pub energy: EnergyArgs,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Stage-2 load as a fraction of the array's pixels.
    #[arg(long, conflicts_with = "boxes")]
    pub load_s: Option<f64>,
    /// Stage-2 boxes as `JxWxH`.
    #[arg(long)]
    pub boxes: Option<String>,
    /// Add one box covering the whole array.
    #[arg(long)]
    pub full_frame_box: bool,
    #[arg(long, value_enum, default_value_t = MemoryArg::Streamed)]
    pub memory_mode: MemoryArg,
    /// Count overlapping ROI pixels once.
    #[arg(long)]
    pub dedup_union: bool,
}

impl CostArgs {
    pub fn memory(&self) -> MemoryMode {
        match self.memory_mode {
            MemoryArg::Streamed => MemoryMode::Streamed,
            MemoryArg::Batched => MemoryMode::Batched,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Frames for `from_annotations` sweeps.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[command(flatten)]
    pub energy: EnergyArgs,
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also write long-format `config,metric,value` CSV here.
    #[arg(long)]
    pub long_output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, env = "HIRISE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Adds one to a formula term before comparing (negative control).
    #[arg(long, hide = true)]
    pub inject_off_by_one: bool,
}
