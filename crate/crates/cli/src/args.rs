use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use iqdisc::annealer::{AnnealConfig, Objective, RegionKind};

#[derive(Debug, Parser)]
#[command(
    name = "iqdisc",
    version,
    about = "Train and evaluate qubit readout discriminators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionArg {
    Circle,
    Ellipse,
}

impl From<RegionArg> for RegionKind {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Circle => RegionKind::Circle,
            RegionArg::Ellipse => RegionKind::Ellipse,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Median,
    Spread,
    MedianPlusSpread,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Median => Objective::Median,
            ObjectiveArg::Spread => Objective::Spread,
            ObjectiveArg::MedianPlusSpread => Objective::MedianPlusSpread,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a bin-balanced set of U3 micro-benchmarks.
    Gen {
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate calibration captures and one run per benchmark.
    Simulate {
        #[arg(long)]
        benchmarks: PathBuf,
        /// Device TOML; the built-in default device when omitted.
        #[arg(long)]
        device: Option<PathBuf>,
        #[arg(long, default_value_t = 1024)]
        shots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Drift day index passed to the device perturbation.
        #[arg(long, default_value_t = 0)]
        day: u64,
        #[arg(long, default_value_t = 0.0)]
        drift: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit the linear baseline on a dataset's calibration captures.
    Baseline {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a circle or ellipse discriminator by simulated annealing.
    Train {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long, value_enum)]
        classifier: RegionArg,
        #[arg(long, value_enum, default_value = "median-plus-spread")]
        objective: ObjectiveArg,
        #[arg(long, default_value_t = AnnealConfig::default().n_iter)]
        iters: u64,
        #[arg(long, default_value_t = AnnealConfig::default().t0)]
        temp: f64,
        #[arg(long, default_value_t = AnnealConfig::default().alpha)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write the accepted-move objective trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Evaluate a model on a dataset's runs.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Include one row per run.
        #[arg(long)]
        per_run: bool,
    },
    /// Tabulate median, p75 and spread of several evaluation reports.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, num_args = 1.., required = true)]
        labels: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a multi-day experiment plan.
    Study {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}
