//! Command-line flags.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coinwalk::evolution::DephasingPlacement;
use coinwalk::shift::ShiftKind;

#[derive(Debug, Parser)]
#[command(
    name = "coinwalk",
    version,
    about = "Coined quantum walks with a tunable coin measurement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position marginal at every step.
    Run(RunArgs),
    /// Visibility, distinguishability and distances over a grid of beta.
    Sweep(SweepArgs),
    /// Time to reach epsilon of uniform, quantum against classical.
    Mix(MixArgs),
    /// Sampled measurement records and their aggregate histogram.
    Trajectory(TrajectoryArgs),
    /// Re-run a previous invocation from its metadata sidecar.
    Replay(ReplayArgs),
}

/// Flags shared by every walk command.
#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    /// Cycle graph on N vertices.
    #[arg(
        long,
        value_name = "N",
        conflicts_with = "graph",
        required_unless_present = "graph"
    )]
    pub cycle: Option<usize>,
    /// JSON graph file.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// hadamard, dft, or `custom FILE` with a JSON coin file.
    #[arg(long, num_args = 1..=2, value_names = ["KIND", "FILE"])]
    pub coin: Vec<String>,
    /// Phase of the generalized Hadamard coin.
    #[arg(long, value_name = "RAD", allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Defaults to direction-preserving on --cycle and port-swap otherwise.
    #[arg(long, value_name = "KIND")]
    pub shift: Option<ShiftKind>,
    /// Coin measurement strength in [0, 1].
    #[arg(
        long,
        value_name = "X",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub beta: f64,
    /// Vertex dephasing strength in [0, 1].
    #[arg(
        long,
        value_name = "P",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    pub vertex_dephasing: f64,
    #[arg(long, value_enum, default_value_t = Placement::BeforeShift)]
    pub dephasing_placement: Placement,
    /// Number of steps (the horizon for mix).
    #[arg(long, value_name = "T", default_value_t = 20)]
    pub steps: usize,
    /// Initial basis state, vertex and port.
    #[arg(long, value_name = "J,K", default_value = "0,0", value_parser = parse_start)]
    pub start: (usize, usize),
    /// Master seed for trajectory sampling; drawn at random and recorded if absent.
    #[arg(long, value_name = "S")]
    pub seed: Option<u64>,
    /// Worker threads for sweep and trajectory; defaults to the core count.
    #[arg(long, value_name = "W")]
    pub jobs: Option<usize>,
    /// Data file; the metadata goes to `<PATH>.meta.json`.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Placement {
    BeforeShift,
    AfterShift,
}

impl From<Placement> for DephasingPlacement {
    fn from(p: Placement) -> Self {
        match p {
            Placement::BeforeShift => DephasingPlacement::BeforeShift,
            Placement::AfterShift => DephasingPlacement::AfterShift,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Number of evenly spaced beta values in [0, 1].
    #[arg(long, value_name = "N", default_value_t = 11, conflicts_with = "betas")]
    pub grid: usize,
    /// Explicit comma-separated beta values.
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct MixArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// TVD threshold, in (0, 1].
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Number of independent trajectories.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Metadata sidecar written by an earlier run.
    #[arg(value_name = "META")]
    pub meta: PathBuf,
    /// Data file for the re-run; a new sidecar is written next to it.
    #[arg(long, value_name = "PATH")]
    pub out: PathBuf,
    /// Worker threads; does not change the output.
    #[arg(long, value_name = "W")]
    pub jobs: Option<usize>,
}

/// Parses `J,K` into a vertex and a port.
pub fn parse_start(s: &str) -> Result<(usize, usize), String> {
    let (j, k) = s
        .split_once(',')
        .ok_or_else(|| format!("expected J,K, got `{s}`"))?;
    let parse = |part: &str, name: &str| {
        part.trim()
            .parse::<usize>()
            .map_err(|e| format!("{name} `{}`: {e}", part.trim()))
    };
    Ok((parse(j, "vertex")?, parse(k, "port")?))
}
