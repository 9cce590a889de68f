use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "mubinfo", version, about = "Information bounds for measurements on mutually unbiased bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build a standard MUB family for a prime dimension and write it as JSON.
    Mubs(MubsArgs),
    /// Print every bound value for a dimension, basis count and priors.
    Bounds(BoundsArgs),
    /// Monte Carlo scan over random priors and POVMs.
    Scan(ScanArgs),
    /// Bin a scan CSV by p_max and report the extremes of I_tot per bin.
    Envelope(EnvelopeArgs),
    /// Search for the POVM with the largest or smallest I_tot.
    Optimize(OptimizeArgs),
    /// Caps on an eavesdropper's information from observed channel information.
    Qkd(QkdArgs),
    /// Random-prior scan plus optimizer restarts against the equal-prior bound.
    Hunt(HuntArgs),
    /// Re-run the command recorded in a manifest file.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Mubs(_) => "mubs",
            Command::Bounds(_) => "bounds",
            Command::Scan(_) => "scan",
            Command::Envelope(_) => "envelope",
            Command::Optimize(_) => "optimize",
            Command::Qkd(_) => "qkd",
            Command::Hunt(_) => "hunt",
            Command::Replay(_) => "replay",
        }
    }
}

/// Where the bases come from: a standard family or a JSON file.
#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct FamilyArgs {
    /// Hilbert-space dimension (prime unless --family is given).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of bases used (2 by default, or every basis of --family).
    #[arg(long)]
    pub mubs: Option<usize>,
    /// Load the family from a JSON file instead of building it.
    #[arg(long)]
    pub family: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorArg {
    Equal,
    Random,
}

#[derive(ValueEnum, Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    #[default]
    Csv,
    Jsonl,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveArg {
    Max,
    Min,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolArg {
    Bb84,
    SixState,
    QuditTwoBasis,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct MubsArgs {
    #[arg(long)]
    pub dim: usize,
    /// Number of bases (defaults to the complete set of d+1).
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 2)]
    pub mubs: usize,
    /// Largest prior of each basis; all 1/d when omitted.
    #[arg(long, num_args = 1..)]
    pub p1: Option<Vec<f64>>,
    /// Emit JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ScanArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Fewest POVM outcomes (defaults to d).
    #[arg(long)]
    pub povm_min: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub povm_max: usize,
    #[arg(long, value_enum, default_value_t = PriorArg::Equal)]
    pub priors: PriorArg,
    #[arg(long, env = "MUBINFO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for bound checks, in bits.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t)]
    pub format: FormatArg,
    /// Record file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct EnvelopeArgs {
    /// Scan CSV to read.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Max)]
    pub objective: ObjectiveArg,
    /// Restrict the search to rank-one POVMs.
    #[arg(long)]
    pub rank_one: bool,
    /// Number of POVM outcomes D.
    #[arg(long)]
    pub outcomes: usize,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 40_000)]
    pub max_evals: usize,
    #[arg(long, value_enum, default_value_t = PriorArg::Equal)]
    pub priors: PriorArg,
    #[arg(long, env = "MUBINFO_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct QkdArgs {
    #[arg(long, value_enum, default_value_t = ProtocolArg::Bb84)]
    pub protocol: ProtocolArg,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Observed information per basis, e.g. `z=0.9`.
    #[arg(long, value_parser = parse_observed)]
    pub observed: Vec<(String, f64)>,
    /// Read the channel estimate from JSON instead of flags.
    #[arg(long, conflicts_with = "observed")]
    pub estimate: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_observed(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected BASIS=VALUE, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_lowercase(), v))
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct HuntArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 20_000)]
    pub max_evals: usize,
    #[arg(long)]
    pub povm_min: Option<usize>,
    #[arg(long, default_value_t = 16)]
    pub povm_max: usize,
    #[arg(long, env = "MUBINFO_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Report file (JSON, including any reproduction bundles).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
