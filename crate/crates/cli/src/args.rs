use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use repsel_core::NormalizeMethod;

#[derive(Debug, Parser)]
#[command(
    name = "repsel",
    version,
    about = "Representative period selection for hourly annual series"
)]
pub struct Cli {
    /// Log more (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select representative periods and write selection, representatives and fidelity.
    Select(SelectArgs),
    /// Clustering baselines.
    #[command(subcommand)]
    Baseline(Baseline),
    /// Objective against number of periods for several period lengths.
    Elbow(ElbowArgs),
    /// Fidelity metrics of an existing selection.json.
    Evaluate(EvaluateArgs),
    /// Write the distance matrix as CSV.
    DumpDistance(DumpArgs),
    /// Write the seeded synthetic year as an input CSV.
    Synth(SynthArgs),
    /// Re-run the command recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Subcommand)]
pub enum Baseline {
    /// k-means on days with medoid representatives.
    Kmeans(KmeansArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    Minmax,
    Zscore,
    None,
}

impl From<Normalize> for NormalizeMethod {
    fn from(n: Normalize) -> Self {
        match n {
            Normalize::Minmax => NormalizeMethod::MinMax,
            Normalize::Zscore => NormalizeMethod::ZScore,
            Normalize::None => NormalizeMethod::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Exact,
    Greedy,
    Swap,
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Hourly CSV with a `timestamp` column.
    #[arg(short, long)]
    pub input: Option<PathBuf>,
    /// Comma-separated feature columns [default: every non-timestamp column].
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Per-feature scaling before distances [default: minmax].
    #[arg(long, value_enum)]
    pub normalize: Option<Normalize>,
    /// Keep only the first N hours (N a multiple of 24).
    #[arg(long, value_name = "N")]
    pub truncate_to_hours: Option<usize>,
    /// TOML file with values for any flag; flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GeometryArgs {
    /// Period length in days [default: 1].
    #[arg(long)]
    pub length_days: Option<usize>,
    /// Window stride in hours [default: 24].
    #[arg(long)]
    pub stride_hours: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CountArgs {
    /// Number of periods to select.
    #[arg(long, conflicts_with = "target_days")]
    pub periods: Option<usize>,
    /// Modeled days to aim for; periods = round(target / length).
    #[arg(long)]
    pub target_days: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BudgetArgs {
    /// Wall-clock limit per exact solve in seconds, 0 for none [default: 600].
    #[arg(long, value_name = "SECS")]
    pub time_limit: Option<f64>,
    /// Branch-and-bound node limit per exact solve [default: 5000000].
    #[arg(long)]
    pub node_limit: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    #[command(flatten)]
    pub count: CountArgs,
    /// [default: exact]
    #[arg(long, value_enum)]
    pub solver: Option<Solver>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// Also write distance.csv.
    #[arg(long)]
    pub dump_distance_matrix: bool,
    /// [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KmeansArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub count: CountArgs,
    /// Seed for k-means++ initialization [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// [default: 300]
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// [default: out]
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ElbowArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated period lengths in days [default: 1,2,3,4,5].
    #[arg(long, value_delimiter = ',')]
    pub lengths: Option<Vec<usize>>,
    /// Window stride in hours [default: 24].
    #[arg(long)]
    pub stride_hours: Option<usize>,
    /// Each curve runs k = 1 up to round(target / length).
    #[arg(long)]
    pub target_days: Option<usize>,
    #[command(flatten)]
    pub budget: BudgetArgs,
    /// [default: elbow.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub selection: PathBuf,
    /// [default: fidelity.json]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub geometry: GeometryArgs,
    /// [default: distance.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 365)]
    pub days: usize,
    #[arg(long, default_value_t = repsel_core::synthetic::FIXTURE_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Fail unless every output hashes as recorded.
    #[arg(long)]
    pub verify: bool,
}
