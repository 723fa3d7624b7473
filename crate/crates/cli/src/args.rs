//! Flag definitions.  Source strength is given either as the ratio `--gamma`
//! or as the two mean photon numbers `--mu`/`--mu-prime`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;
use twophoton::sources::WcsPair;

#[derive(Parser, Debug)]
#[command(
    name = "twophoton",
    version,
    about = "Two-photon interference at a 4x4 splitter: sweeps, state dumps, Monte Carlo runs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the full two-photon output state and its post-selected block as JSON
    StateDump(StateDumpArgs),
    /// Coincidence probabilities over a source-overlap grid, optionally with Monte Carlo counts
    HomSweep(HomSweepArgs),
    /// Two-photon and single-photon fringes over a phase grid, with fitted frequencies
    Fringe(FringeArgs),
    /// Purity, coherence, and discord of the post-selected state over a ratio grid
    DiscordSweep(DiscordSweepArgs),
    /// Location and value of the discord maximum
    DiscordMax(DiscordMaxArgs),
    /// Ideal and noisy discord curves under dephasing and partial overlap
    NoisyCurve(NoisyCurveArgs),
}

/// Source strength flags shared by the fixed-ratio commands.
#[derive(Args, Debug)]
pub struct SourceArgs {
    /// Intensity ratio of the two sources (default 1)
    #[arg(long, conflicts_with_all = ["mu", "mu_prime"])]
    pub gamma: Option<f64>,
    /// Mean photon number of the second source; requires --mu-prime
    #[arg(long, requires = "mu_prime")]
    pub mu: Option<f64>,
    /// Mean photon number of the first source; requires --mu
    #[arg(long, requires = "mu")]
    pub mu_prime: Option<f64>,
}

impl SourceArgs {
    pub fn resolve(&self) -> Result<WcsPair, CliError> {
        match (self.mu, self.mu_prime) {
            (Some(mu), Some(mu_prime)) => {
                Ok(WcsPair::from_mean_photon_numbers(mu, mu_prime)?)
            }
            _ => Ok(WcsPair::new(self.gamma.unwrap_or(1.0))?),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct TableOutArgs {
    /// Output file; default <command>.<ext> in the output directory
    /// (TWOPHOTON_OUT_DIR or the working directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table encoding; csv writes a .meta.json sidecar, json embeds metadata
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct JsonOutArgs {
    /// Output file; default <command>.json in the output directory
    /// (TWOPHOTON_OUT_DIR or the working directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StateDumpArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub out: JsonOutArgs,
}

#[derive(Args, Debug)]
pub struct HomSweepArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Lowest source overlap of the sweep
    #[arg(long, default_value_t = 0.0)]
    pub f_min: f64,
    /// Highest source overlap of the sweep
    #[arg(long, default_value_t = 1.0)]
    pub f_max: f64,
    /// Number of grid intervals (the grid has steps + 1 points)
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    /// Enable Monte Carlo columns with this RNG seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pulses per Monte Carlo run
    #[arg(long, default_value_t = 1_000_000)]
    pub pulses: u64,
    /// Probability per pulse of a two-photon event
    #[arg(long, default_value_t = 0.1)]
    pub rate: f64,
    /// Coincidence window metadata (ns)
    #[arg(long, default_value_t = 1.0)]
    pub window_ns: f64,
    /// Per-pulse, per-detector dark count probability
    #[arg(long, default_value_t = 0.0)]
    pub dark_count_prob: f64,
    #[command(flatten)]
    pub out: TableOutArgs,
}

#[derive(Args, Debug)]
pub struct FringeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// First mode of the recombined pair
    #[arg(long, default_value_t = 0)]
    pub pair_j: usize,
    /// Second mode of the recombined pair
    #[arg(long, default_value_t = 1)]
    pub pair_k: usize,
    /// Number of phase samples, uniform over one full turn
    #[arg(long, default_value_t = 180)]
    pub points: usize,
    /// Off-diagonal contrast of the single-photon reference
    #[arg(long, default_value_t = 0.2)]
    pub single_photon_contrast: f64,
    /// Diagnostic: drop the pair-block coherences, flattening the fringe
    #[arg(long, default_value_t = false)]
    pub zero_coherence: bool,
    #[command(flatten)]
    pub out: TableOutArgs,
}

#[derive(Args, Debug)]
pub struct DiscordSweepArgs {
    /// Lowest intensity ratio
    #[arg(long, default_value_t = 0.0)]
    pub gamma_min: f64,
    /// Highest intensity ratio
    #[arg(long, default_value_t = 1.0)]
    pub gamma_max: f64,
    /// Number of grid intervals (the grid has steps + 1 points)
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub out: TableOutArgs,
}

#[derive(Args, Debug)]
pub struct DiscordMaxArgs {
    /// Allowed drift between the maximum and the branch crossing
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    pub out: JsonOutArgs,
}

#[derive(Args, Debug)]
pub struct NoisyCurveArgs {
    /// Dephasing factor applied to every off-diagonal element
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Pairwise overlap of the two sources
    #[arg(long, default_value_t = 1.0)]
    pub visibility: f64,
    /// Lowest intensity ratio
    #[arg(long, default_value_t = 0.0)]
    pub gamma_min: f64,
    /// Highest intensity ratio
    #[arg(long, default_value_t = 1.0)]
    pub gamma_max: f64,
    /// Number of grid intervals (the grid has steps + 1 points)
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[command(flatten)]
    pub out: TableOutArgs,
}
