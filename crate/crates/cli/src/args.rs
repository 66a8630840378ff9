use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::angle::parse_angle;

#[derive(Debug, Parser)]
#[command(
    name = "eavesdrop",
    version,
    about = "Cloning attacks on BB84: theory, sweeps, analysis and protocol runs"
)]
pub struct Cli {
    /// TOML file with default settings; command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate theoretical fidelities, error rates and key rates.
    Theory(TheoryArgs),
    /// Run a fidelity sweep over random cloning angles and write a CSV.
    Sweep(SweepArgs),
    /// Fit, intersect and bootstrap a sweep CSV into a JSON report.
    Analyze(AnalyzeArgs),
    /// Simulate BB84 with an optional cloning eavesdropper.
    Protocol(ProtocolArgs),
    /// Optimal cloner coefficients for a target shrinking factor of Bob's clone.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args, Default)]
pub struct NoiseArgs {
    /// Error probability per single-qubit gate.
    #[arg(long, value_name = "P")]
    pub noise_p1: Option<f64>,
    /// Error probability per two-qubit gate.
    #[arg(long, value_name = "P")]
    pub noise_p2: Option<f64>,
    /// Bit-flip probability per measured qubit.
    #[arg(long, value_name = "P")]
    pub noise_readout: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// `start:stop:count` or a comma-separated list of angles.
    #[arg(long, default_value = "0:pi/4:100")]
    pub grid: String,
    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Comma-separated subset of plus, minus, plus_i, minus_i.
    #[arg(long, value_delimiter = ',')]
    pub states: Option<Vec<String>>,
    /// Cloning angles drawn per state.
    #[arg(long)]
    pub angles: Option<usize>,
    /// Shots per angle.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_min: Option<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Output CSV path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Sweep CSV to analyze.
    pub input: PathBuf,
    /// Replicates for the Monte-Carlo and bootstrap intervals.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Resample the two fidelity series independently.
    #[arg(long)]
    pub unpaired: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output JSON path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fitted-curve CSV path; defaults to `<out>.plot.csv` when --out is given.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Cloning angle of the eavesdropper; no eavesdropper if omitted.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub eve_theta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Output JSON path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Target shrinking factor of Bob's clone, in (0, 1).
    #[arg(long, allow_hyphen_values = true)]
    pub eta_a: f64,
    /// Output JSON path; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
