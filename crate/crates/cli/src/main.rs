//! `metaemf`: gain patterns, conditional CDFs, moment curves, meta
//! distributions and the validation suite, as CSV or JSON.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::CliError;

#[derive(Debug, Parser)]
#[command(name = "metaemf", version, about = "EMF exposure statistics of beamforming Poisson networks")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Model flags override the config file.
#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// JSON config document (external units); the reference scenario if absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads (default: machine parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file; stdout if absent. A `<out>.manifest.json` is written next to it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the antenna count N.
    #[arg(long, global = true)]
    pub n_antennas: Option<u32>,
    /// Override k_max; defaults to min(config k_max, bound(N)) when only N changes.
    #[arg(long, global = true)]
    pub k_max: Option<u32>,
    /// Override the exclusion radius, m.
    #[arg(long, global = true)]
    pub r_e: Option<f64>,
    /// Override the BS density, BS/km².
    #[arg(long, global = true)]
    pub lambda_bs: Option<f64>,
    /// Override the Nakagami shape.
    #[arg(long, global = true)]
    pub m_fading: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and multi-cosine ULA gain over [−π/3, π/3).
    Gain {
        /// Number of angles.
        #[arg(long, default_value_t = 2048)]
        points: usize,
    },
    /// Conditional CDF of one layout, analytic and empirical.
    Cdf {
        /// Layout file, one radius (m) per line after a header.
        #[arg(long)]
        realization: Option<PathBuf>,
        /// Otherwise sample layout number INDEX from the master seed.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[command(flatten)]
        grid: TeGrid,
        /// Time draws for the empirical column.
        #[arg(long, default_value_t = 10_000)]
        time_draws: usize,
    },
    /// First and second moments of the conditional CDF.
    Moments {
        #[command(flatten)]
        grid: TeGrid,
        #[arg(long, value_enum, default_value_t = MomentMethod::Analytic)]
        method: MomentMethod,
        /// ω sign convention for the analytic M₂.
        #[arg(long, value_enum, default_value_t = Omega::Derived)]
        omega: Omega,
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Meta distribution at one threshold.
    Meta {
        /// Threshold, dBm/m².
        #[arg(long, allow_hyphen_values = true)]
        te: f64,
        #[command(flatten)]
        grid: SGrid,
        #[arg(long, value_enum, default_value_t = MetaMethodArg::Beta)]
        method: MetaMethodArg,
        /// Moment-matching denominator of the beta fit.
        #[arg(long, value_enum, default_value_t = Denominator::Variance)]
        denominator: Denominator,
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Full acceptance suite; JSON report of every check.
    Validate {
        #[command(flatten)]
        plan: PlanArgs,
        /// Multiplies every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Randomized special-function parameter sets.
        #[arg(long, default_value_t = 100)]
        special_cases: usize,
        /// Comma-separated criteria to run (e.g. `1,2,9`); all if absent.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

/// Threshold grid in dBm/m².
#[derive(Debug, Args, Clone)]
pub struct TeGrid {
    #[arg(long, default_value_t = -60.0, allow_hyphen_values = true)]
    pub te_min: f64,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub te_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub te_step: f64,
}

#[derive(Debug, Args, Clone)]
pub struct SGrid {
    #[arg(long, default_value_t = 0.01)]
    pub s_min: f64,
    #[arg(long, default_value_t = 0.99)]
    pub s_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub s_step: f64,
}

/// Monte-Carlo plan size.
#[derive(Debug, Args, Clone)]
pub struct PlanArgs {
    #[arg(long, default_value_t = 1000)]
    pub realizations: usize,
    #[arg(long, default_value_t = 1000)]
    pub time_draws: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MomentMethod {
    Analytic,
    Empirical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Omega {
    Derived,
    TheoremPrinted,
    AppendixPrinted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetaMethodArg {
    Beta,
    Empirical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Denominator {
    Variance,
    Printed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("metaemf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(_) => 2,
            CliError::NonFinite(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}
