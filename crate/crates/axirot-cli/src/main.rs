//! Command-line front end for single-axis rotation estimation: ingests
//! correspondence files, generates synthetic scenes, and drives the batch
//! experiments. Failures map to stable exit codes so scripts can branch on
//! what went wrong.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "axirot",
    version,
    about = "Rotation angle about a fixed axis from two-view correspondences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the rotation angle from a correspondence file.
    Estimate(EstimateArgs),
    /// Generate a synthetic correspondence file with known ground truth.
    Synth(SynthArgs),
    /// Compare the estimators over a grid of rotation angles.
    Sweep(BatchArgs),
    /// Compare the estimators over a grid of noise levels at a fixed angle.
    Noise(BatchArgs),
    /// Map which lattice points determine the angle poorly.
    Condmap(BatchArgs),
    /// Tabulate the angle response to pixel shifts of one correspondence.
    Shift(ShiftArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Ransac,
    Histogram,
    Median,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    /// Degrees, 6 decimals.
    Deg,
    /// Radians, 9 decimals.
    Rad,
}

#[derive(Args)]
struct EstimateArgs {
    /// Correspondence file with header x,y,x_prime,y_prime.
    file: PathBuf,
    /// Estimation method.
    #[arg(long, value_enum, default_value = "ransac")]
    method: MethodArg,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Angle units in the report.
    #[arg(long, value_enum, default_value = "deg")]
    units: UnitsArg,
    /// Consensus sampler seed; defaults to AXIROT_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the report to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Output correspondence file; metadata goes to <output>.meta.
    #[arg(long)]
    output: PathBuf,
    /// Ground-truth rotation angle in degrees; overrides the config key.
    #[arg(long)]
    angle_deg: Option<f64>,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; defaults to AXIROT_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BatchArgs {
    /// Output table; metadata goes to <output>.meta.
    #[arg(long)]
    output: PathBuf,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; defaults to AXIROT_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores. Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ShiftArgs {
    /// Output table; metadata goes to <output>.meta.
    #[arg(long)]
    output: PathBuf,
    /// Flat key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {}", error.message());
            ExitCode::from(error.exit_code())
        }
    }
}
