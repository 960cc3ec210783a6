use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use polya_core::graph::GraphFormat;
use polya_core::harness::OutputFormat;
use polya_core::policy::StrategySpec;

#[derive(Debug, Parser)]
#[command(name = "polya", version, about = "Polya urn contagion on networks")]
pub struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo trials.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Time steps per trial.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format for series: csv or json.
    #[arg(long, global = true)]
    pub format: Option<OutputFormat>,
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a preferential-attachment network.
    Gen(GenArgs),
    /// Nested neighborhoods, centralities and target sets as JSON.
    Inspect(NetArgs),
    /// Exact infection rate and expected exposure on a small network.
    Exact(ExactArgs),
    /// Monte Carlo run of an initialization strategy.
    InitRun(RunArgs),
    /// Monte Carlo run of a curing strategy.
    CureRun(RunArgs),
    /// Equilibrium of the one-step curing/infection game.
    Game(GameArgs),
    /// Run several arms with shared randomness and compare them.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub nodes: usize,
    /// Edges added per new node.
    #[arg(long)]
    pub m: usize,
    /// File layout: adj or edges. Defaults from the --out extension, else edges.
    #[arg(long)]
    pub graph_format: Option<GraphFormat>,
}

#[derive(Debug, Args)]
pub struct NetArgs {
    /// Adjacency matrix or edge list.
    #[arg(long)]
    pub net: PathBuf,
    /// Keep the largest component of a disconnected network.
    #[arg(long, conflicts_with = "allow_disconnected")]
    pub largest_component: bool,
    /// Accept a disconnected network (exact and game only need neighborhoods).
    #[arg(long)]
    pub allow_disconnected: bool,
}

/// Initial masses: an explicit per-node list or one value for every node.
#[derive(Debug, Args)]
pub struct MassArgs {
    /// Initial red masses, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub red: Option<Vec<f64>>,
    /// Initial black masses, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub black: Option<Vec<f64>>,
    /// Red mass at every node when --red is not given.
    #[arg(long, default_value_t = 1.0)]
    pub red_each: f64,
    /// Black mass at every node when --black is not given.
    #[arg(long, default_value_t = 1.0)]
    pub black_each: f64,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub mass: MassArgs,
    /// Time at which to evaluate the average infection rate.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub delta_red: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta_black: f64,
    /// Largest number of enumerated draw bits.
    #[arg(long, default_value_t = polya_core::oracle::DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    /// Curing step for the expected exposure at the first step, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., requires = "infect")]
    pub cure: Option<Vec<f64>>,
    /// Infection step for the expected exposure, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., requires = "cure")]
    pub infect: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// TOML experiment file; flags below override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Network file.
    #[arg(long)]
    pub net: Option<PathBuf>,
    #[arg(long)]
    pub largest_component: bool,
    /// Generate a preferential-attachment network with this many nodes.
    #[arg(long, requires = "ba_m")]
    pub ba_nodes: Option<usize>,
    #[arg(long, requires = "ba_nodes")]
    pub ba_m: Option<usize>,
    #[arg(long)]
    pub ba_seed: Option<u64>,
    /// Black initialization budget.
    #[arg(long)]
    pub init_budget: Option<f64>,
    /// Red initialization budget (spread uniformly).
    #[arg(long)]
    pub red_budget: Option<f64>,
    /// Per-step curing budget.
    #[arg(long)]
    pub cure_budget: Option<f64>,
    /// Per-step infection budget (spread uniformly).
    #[arg(long)]
    pub infection_budget: Option<f64>,
    /// Fixed red reinforcement when no curing strategy is set.
    #[arg(long)]
    pub delta_red: Option<f64>,
    /// Fixed black reinforcement when no curing strategy is set.
    #[arg(long)]
    pub delta_black: Option<f64>,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub exp: ExperimentArgs,
    /// Strategy tag such as init:vi or cure:iv.
    #[arg(long)]
    pub strategy: Option<StrategySpec>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub exp: ExperimentArgs,
    /// Arms as tags, e.g. `--arms init:ii,init:iii`; replaces config sections.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub arms: Vec<StrategySpec>,
    /// Separate random streams per arm.
    #[arg(long)]
    pub independent: bool,
    /// Also write pairwise differences as CSV here.
    #[arg(long)]
    pub diff_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    #[command(flatten)]
    pub net: NetArgs,
    #[command(flatten)]
    pub mass: MassArgs,
    #[arg(long)]
    pub cure_budget: f64,
    #[arg(long)]
    pub infect_budget: f64,
    #[arg(long, default_value_t = 200)]
    pub rounds: usize,
    /// Target exploitability.
    #[arg(long, default_value_t = 1e-4)]
    pub tolerance: f64,
}
