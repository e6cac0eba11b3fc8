use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stm", version, about = "Spatio-temporally modulated circulator toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the modulation that isolates port 3 at the carrier.
    Design(DesignArgs),
    /// S-parameters over a frequency band.
    Sparams(SparamsArgs),
    /// Design chart over modulation frequency and depth.
    Sweep(SweepArgs),
    /// Port spectrum of one time-domain run.
    Spectrum(SpectrumArgs),
    /// Run the invariant suites and report pass/fail.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Key-value file preloading any flag of the command.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Voltage,
    Current,
}

impl Family {
    pub fn core(self) -> stm_core::analytic::Family {
        match self {
            Family::Voltage => stm_core::analytic::Family::Voltage,
            Family::Current => stm_core::analytic::Family::Current,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Voltage => "voltage",
            Family::Current => "current",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Topology {
    SeDelta,
    SeWye,
    Voltage,
    Current,
}

impl Topology {
    pub fn core(self) -> stm_core::tdsim::Topology {
        use stm_core::tdsim::Topology as T;
        match self {
            Topology::SeDelta => T::SeDelta,
            Topology::SeWye => T::SeWye,
            Topology::Voltage => T::DiffVoltage,
            Topology::Current => T::DiffCurrent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Elastance {
    Exact,
    FirstHarmonic,
}

impl Elastance {
    pub fn core(self) -> stm_core::tdsim::ElastanceModel {
        match self {
            Elastance::Exact => stm_core::tdsim::ElastanceModel::Exact,
            Elastance::FirstHarmonic => stm_core::tdsim::ElastanceModel::FirstHarmonic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Analytic,
    Td,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Rotation {
    Cw,
    Ccw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Fixed,
    Retune,
}

/// Tank and port description. Every flag is optional here so that a config file
/// can supply it; missing values are reported after merging.
#[derive(Debug, Args)]
pub struct Circuit {
    /// Tank inductance (H).
    #[arg(long)]
    pub l0: Option<f64>,
    /// Tank resonance (Hz).
    #[arg(long)]
    pub f0: Option<f64>,
    /// Unloaded quality factor; `inf` for lossless tanks.
    #[arg(long)]
    pub q0: Option<f64>,
    /// Port impedance (ohm).
    #[arg(long)]
    pub z0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct Modulation {
    /// Modulation frequency (Hz).
    #[arg(long)]
    pub fm: Option<f64>,
    /// Capacitance modulation depth dC/C0.
    #[arg(long)]
    pub dc: Option<f64>,
    /// Global modulation phase (rad).
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    #[arg(long, value_enum, default_value_t = Rotation::Cw)]
    pub direction: Rotation,
}

#[derive(Debug, Args)]
pub struct Limits {
    /// Minimum isolation inside the band (dB).
    #[arg(long, default_value_t = 20.0)]
    pub ix_min: f64,
    /// Minimum return loss inside the band (dB).
    #[arg(long, default_value_t = 20.0)]
    pub rl_min: f64,
    /// Maximum insertion loss inside the band (dB).
    #[arg(long, default_value_t = 3.0)]
    pub il_max: f64,
}

impl Limits {
    pub fn thresholds(&self) -> stm_core::Thresholds {
        stm_core::Thresholds { ix_min_db: self.ix_min, rl_min_db: self.rl_min, il_max_db: self.il_max }
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct DesignArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub circuit: Circuit,
    /// Carrier frequency (Hz).
    #[arg(long)]
    pub frf: Option<f64>,
    #[arg(long, value_enum, default_value_t = Family::Voltage)]
    pub topology: Family,
    /// Modulation used while tuning f0, relative to the carrier.
    #[arg(long, default_value_t = 0.1)]
    pub tune_fm_ratio: f64,
    /// Depth used while tuning f0.
    #[arg(long, default_value_t = 0.5)]
    pub tune_dc: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SparamsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub circuit: Circuit,
    #[command(flatten)]
    pub modulation: Modulation,
    #[command(flatten)]
    pub limits: Limits,
    #[arg(long, value_enum, default_value_t = Family::Voltage)]
    pub topology: Family,
    /// First frequency (Hz).
    #[arg(long)]
    pub fstart: Option<f64>,
    /// Last frequency (Hz).
    #[arg(long)]
    pub fstop: Option<f64>,
    /// Number of frequency points.
    #[arg(long, default_value_t = 201)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = Engine::Analytic)]
    pub engine: Engine,
    /// Capacitor law of the time-domain engine.
    #[arg(long, value_enum, default_value_t = Elastance::Exact)]
    pub elastance: Elastance,
    /// Largest denominator when snapping the carrier to the modulation.
    #[arg(long, default_value_t = 64)]
    pub max_q: u64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub circuit: Circuit,
    #[command(flatten)]
    pub limits: Limits,
    /// Carrier frequency (Hz).
    #[arg(long)]
    pub frf: Option<f64>,
    #[arg(long, value_enum, default_value_t = Family::Voltage)]
    pub topology: Family,
    #[arg(long, default_value_t = 0.005)]
    pub fm_min: f64,
    #[arg(long, default_value_t = 0.3)]
    pub fm_max: f64,
    #[arg(long, default_value_t = 60)]
    pub n_fm: usize,
    #[arg(long, default_value_t = 0.015)]
    pub dc_min: f64,
    #[arg(long, default_value_t = 0.9)]
    pub dc_max: f64,
    #[arg(long, default_value_t = 60)]
    pub n_dc: usize,
    /// Frequency points per cell.
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Half-width of each cell's band relative to the carrier.
    #[arg(long, default_value_t = 0.1)]
    pub span: f64,
    #[arg(long, value_enum, default_value_t = Mode::Fixed)]
    pub mode: Mode,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub circuit: Circuit,
    #[command(flatten)]
    pub modulation: Modulation,
    /// Carrier frequency (Hz).
    #[arg(long)]
    pub frf: Option<f64>,
    /// Excited port.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub port: u8,
    #[arg(long, value_enum, default_value_t = Topology::Voltage)]
    pub topology: Topology,
    #[arg(long, value_enum, default_value_t = Elastance::Exact)]
    pub elastance: Elastance,
    #[arg(long, default_value_t = 64)]
    pub max_q: u64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
}
