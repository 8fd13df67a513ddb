use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Transient forerunner calculations for tunneling models, written as CSV.
#[derive(Debug, Parser)]
#[command(name = "forerunner", version)]
pub struct Cli {
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub invocation: Invocation,
}

#[derive(Debug, Subcommand)]
pub enum Invocation {
    #[command(flatten)]
    Run(Command),
    /// Re-run the command echoed in the header of an earlier CSV file.
    Replay {
        csv: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Source,
    Shutter,
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleModel {
    Shutter,
    Step,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Physics {
    /// Barrier height (eV).
    #[arg(long = "V")]
    pub v: f64,
    /// Incidence energy (eV).
    #[arg(long = "E0", conflicts_with = "e0_frac", required_unless_present = "e0_frac")]
    pub e0: Option<f64>,
    /// Incidence energy as a fraction of V.
    #[arg(long = "E0-frac")]
    pub e0_frac: Option<f64>,
    /// Barrier length (nm), used by the shutter.
    #[arg(long = "L")]
    pub length: Option<f64>,
    /// Effective mass in units of the electron mass.
    #[arg(long = "mass-ratio", default_value_t = 0.067)]
    pub mass_ratio: f64,
}

/// Physics without an incidence energy, for sweeps over E0.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Medium {
    #[arg(long = "V")]
    pub v: f64,
    #[arg(long = "L")]
    pub length: Option<f64>,
    #[arg(long = "mass-ratio", default_value_t = 0.067)]
    pub mass_ratio: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative time tolerance of peak refinement.
    #[arg(long = "tol-refine", default_value_t = 1e-6)]
    pub refine: f64,
    /// Relative tolerance of the step and shutter quadratures.
    #[arg(long = "tol-quad", default_value_t = 1e-10)]
    pub quad: f64,
    /// Stability of numeric time derivatives under step halving.
    #[arg(long = "tol-omega", default_value_t = 1e-4)]
    pub omega: f64,
    /// Amplitude floor, relative to the local maximum, below which ω_av is undefined.
    #[arg(long = "tol-floor", default_value_t = 1e-10)]
    pub floor: f64,
    /// Coarse samples per peak window.
    #[arg(long = "coarse-points", default_value_t = 256)]
    pub coarse_points: usize,
    /// Earliest time (fs) the shutter pole table must resolve.
    #[arg(long = "poles-t-min", default_value_t = 0.05)]
    pub poles_t_min: f64,
    /// Fixed number of resonant states for the shutter, overriding --poles-t-min.
    #[arg(long = "poles-N")]
    pub poles_n: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct TimeAxis {
    #[arg(long = "t-max")]
    pub t_max: f64,
    #[arg(long = "nt", default_value_t = 200)]
    pub nt: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct XAxis {
    #[arg(long = "x-min")]
    pub x_min: f64,
    #[arg(long = "x-max")]
    pub x_max: f64,
    #[arg(long = "nx", default_value_t = 24)]
    pub nx: usize,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// |Ψ|², |Ψ0|², |Ψs|² and |Ψ0+Ψs|² of the sharp-onset source at one x.
    SourceDensity {
        #[command(flatten)]
        physics: Physics,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        time: TimeAxis,
    },
    /// Density and ω_av/ω_V against t at one x.
    FrequencyTrace {
        #[arg(long, value_enum)]
        model: Model,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long)]
        x: f64,
        #[command(flatten)]
        time: TimeAxis,
    },
    /// First-peak time and frequency over a range of x.
    PeakMap {
        #[arg(long, value_enum)]
        model: Model,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[command(flatten)]
        space: XAxis,
        /// Peak window end (fs); 20ħ/(V − E0) when absent.
        #[arg(long = "t-max")]
        t_max: Option<f64>,
    },
    /// t_p(x) with its basin minimum and tail slope.
    Basin {
        #[arg(long, value_enum)]
        model: Model,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[command(flatten)]
        space: XAxis,
        #[arg(long = "t-max")]
        t_max: Option<f64>,
    },
    /// Basin-minimum t_p for each E0 and its fit against 1/(V − E0).
    FitTp {
        #[arg(long, value_enum)]
        model: Model,
        #[command(flatten)]
        medium: Medium,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long = "E0-list", value_delimiter = ',', required = true)]
        e0_list: Vec<f64>,
        /// Basin grid in units of the penetration length 1/κ0.
        #[arg(long = "xk-min", default_value_t = 0.2)]
        xk_min: f64,
        #[arg(long = "xk-max", default_value_t = 4.8)]
        xk_max: f64,
        #[arg(long = "nx", default_value_t = 24)]
        nx: usize,
    },
    /// Shutter density profiles at fixed times, with the stationary profile.
    ShutterSnapshots {
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 4.0])]
        times: Vec<f64>,
        #[arg(long = "x-min", default_value_t = 0.0)]
        x_min: f64,
        #[arg(long = "x-max", default_value_t = 3.0)]
        x_max: f64,
        #[arg(long = "nx", default_value_t = 61)]
        nx: usize,
    },
    /// Shutter density against t at several positions.
    ShutterDensity {
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.7, 1.0, 2.0])]
        x: Vec<f64>,
        #[command(flatten)]
        time: TimeAxis,
    },
    /// Resonance poles of the square barrier.
    Poles {
        #[command(flatten)]
        physics: Physics,
        #[arg(long = "poles-N", default_value_t = 10)]
        poles_n: usize,
    },
    /// Step model: ω_av at the forerunner peak against x, with ω0 and ω_s.
    StepFrequency {
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[command(flatten)]
        space: XAxis,
    },
    /// Step model basin.
    StepBasin {
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[command(flatten)]
        space: XAxis,
    },
    /// Model density against a Crank–Nicolson run of the same initial state.
    OracleCompare {
        #[arg(long, value_enum)]
        model: OracleModel,
        #[command(flatten)]
        physics: Physics,
        #[command(flatten)]
        tol: Tolerances,
        #[arg(long = "x-max")]
        x_max: f64,
        #[arg(long = "nx", default_value_t = 16)]
        nx: usize,
        #[command(flatten)]
        time: TimeAxis,
        /// Integrator spacing (nm).
        #[arg(long, default_value_t = 0.01)]
        dx: f64,
        /// Integrator step (fs).
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Bound on physical signal speed (nm/fs) used to size the domain.
        #[arg(long = "v-signal", default_value_t = 6.0)]
        v_signal: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::SourceDensity { .. } => "source-density",
            Command::FrequencyTrace { .. } => "frequency-trace",
            Command::PeakMap { .. } => "peak-map",
            Command::Basin { .. } => "basin",
            Command::FitTp { .. } => "fit-tp",
            Command::ShutterSnapshots { .. } => "shutter-snapshots",
            Command::ShutterDensity { .. } => "shutter-density",
            Command::Poles { .. } => "poles",
            Command::StepFrequency { .. } => "step-frequency",
            Command::StepBasin { .. } => "step-basin",
            Command::OracleCompare { .. } => "oracle-compare",
        }
    }
}
