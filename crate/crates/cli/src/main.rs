//! `uav-sizer` command-line front end.
//!
//! Exit codes: 0 when everything passes, 1 when a design check fails,
//! 2 on malformed input or invalid arguments.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "uav-sizer",
    version,
    about = "Multirotor UAV sizing and design checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Thrust-stand CSV for the motor
    #[arg(long, global = true)]
    pub curve: Option<PathBuf>,
    /// Design description (JSON)
    #[arg(long, global = true)]
    pub design: Option<PathBuf>,
    /// Component catalog (JSON) for `search`
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Override the design's usable battery fraction
    #[arg(long, global = true)]
    pub usable_fraction: Option<f64>,
    /// Maximum allowed hover PWM in microseconds
    #[arg(long, global = true, default_value_t = 1600.0)]
    pub pwm_threshold: f64,
    /// Override the design's fixed loss power
    #[arg(long, global = true)]
    pub loss_power_w: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Interp::Linear)]
    pub interp: Interp,
    /// Frontier sampling step in microseconds
    #[arg(long, global = true, default_value_t = 10.0)]
    pub pwm_step: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest a thrust-stand CSV, validate it, and summarise the curve
    Fit,
    /// Evaluate a design against the PWM, endurance and battery checks
    Check,
    /// Predict hover endurance for a design
    Predict,
    /// Flight power and endurance as payload is added
    Sweep {
        /// First payload added to the design, kg
        #[arg(long, default_value_t = 0.0)]
        payload_min: f64,
        /// Last payload added to the design, kg
        #[arg(long, default_value_t = 0.0)]
        payload_max: f64,
        /// Payload increment, kg
        #[arg(long, default_value_t = 0.05)]
        payload_step: f64,
    },
    /// Battery capacity-vs-mass frontier and the design battery's verdict
    Frontier,
    /// Exhaustively search a component catalog for passing designs
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Interp {
    Linear,
    MonotoneCubic,
}

/// Whether the run's checks passed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
