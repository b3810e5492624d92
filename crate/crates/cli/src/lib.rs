//! Command-line front end: figure data, timescale reports, oracle
//! certification and density-matrix runs.

pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod svg;

use std::io::Write;

use clap::{Parser, Subcommand};

use crate::config::{RunConfig, ScenarioArgs};
use crate::error::Result;
use crate::figures::FigureId;

#[derive(Debug, Parser)]
#[command(name = "decoherence", version, about = "Double-slit decoherence in an Ohmic bath", allow_negative_numbers = true)]
pub struct Cli {
    #[command(flatten)]
    pub scenario: ScenarioArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the characteristic timescales (CSV too when --out is given)
    Timescales,
    /// Write the data and plot of one figure
    Figure {
        #[arg(value_enum)]
        id: FigureId,
    },
    /// P(x, t) and its decomposition at one time
    Profile {
        /// Time in units of t_mix
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Attenuation factors against time
    Attenuation,
    /// Compare the quadrature oracle with the closed-form density
    OracleCheck {
        /// Check the single-slit reduction instead
        #[arg(long)]
        single_slit: bool,
    },
    /// Density matrices, a_OD and the unitary invariance sweep (gamma = 0)
    Densmat {
        /// Grid points per axis
        #[arg(long, default_value_t = decoherence::densmat::DEFAULT_MATRIX_POINTS)]
        points: usize,
        /// Prepare a pure state instead of the thermal one
        #[arg(long)]
        zero_temperature: bool,
    },
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let cfg = RunConfig::from_args(&cli.scenario)?;
    match &cli.command {
        Command::Timescales => commands::timescales_report(&cfg, stdout),
        Command::Figure { id } => commands::figure(*id, &cfg, stdout),
        Command::Profile { time } => {
            if !(time.is_finite() && *time >= 0.0) {
                return Err(error::CliError::Validation(format!("--time must be >= 0, got {time}")));
            }
            commands::profile_cmd(&cfg, *time, stdout)
        }
        Command::Attenuation => commands::attenuation_cmd(&cfg, stdout),
        Command::OracleCheck { single_slit } => commands::oracle_check(&cfg, *single_slit, stdout, stderr),
        Command::Densmat { points, zero_temperature } => {
            if *points < 16 {
                return Err(error::CliError::Validation(format!("--points must be at least 16, got {points}")));
            }
            commands::densmat_cmd(&cfg, *points, *zero_temperature, stdout)
        }
    }
}
