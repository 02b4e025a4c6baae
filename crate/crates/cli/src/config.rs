//! Resolved walk configuration, as recorded in the metadata sidecar.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use coinwalk::coin::{parse_coin_json, CoinConfig};
use coinwalk::evolution::{DephasingPlacement, StepMap};
use coinwalk::graph::{parse_graph_json, GraphFile, PortGraph};
use coinwalk::shift::{ShiftKind, ShiftOperator};
use coinwalk::state::PureState;
use serde::{Deserialize, Serialize};

use crate::args::WalkArgs;
use crate::error::CliError;

/// Where the graph came from. Informational; the graph itself is stored in
/// [`WalkConfig::graph`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphSource {
    Cycle { n: usize },
    File { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Start {
    pub vertex: usize,
    pub port: usize,
}

/// Everything needed to rebuild the walk without the original command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkConfig {
    pub graph_source: GraphSource,
    pub graph: GraphFile,
    pub coin: CoinConfig,
    pub shift: ShiftKind,
    pub beta: f64,
    pub vertex_dephasing: f64,
    pub dephasing_placement: DephasingPlacement,
    pub steps: usize,
    pub start: Start,
}

/// A validated configuration with its operators built.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: WalkConfig,
    pub graph: PortGraph,
    /// Step without coin measurement.
    pub template: StepMap,
    /// Step with the configured coin measurement and vertex dephasing.
    pub step: StepMap,
    pub psi0: PureState,
}

fn read_input(path: &Path, what: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {what} {}: {e}", path.display())))
}

fn resolve_coin(args: &WalkArgs, graph: &PortGraph) -> Result<CoinConfig, CliError> {
    let kind = args.coin.first().map(String::as_str);
    let coin = match (kind, args.coin.get(1)) {
        (None, None) => {
            if graph.degree() == 2 && graph.is_regular() {
                CoinConfig::Hadamard {
                    phi: args.phi.unwrap_or(FRAC_PI_2),
                }
            } else {
                CoinConfig::Dft {}
            }
        }
        (Some("hadamard"), None) => CoinConfig::Hadamard {
            phi: args.phi.unwrap_or(FRAC_PI_2),
        },
        (Some("dft"), None) => CoinConfig::Dft {},
        (Some("custom"), Some(file)) => {
            let text = read_input(Path::new(file), "coin file")?;
            parse_coin_json(&text)
                .map_err(|e| CliError::Config(format!("coin file {file}: {e}")))?
        }
        (Some("custom"), None) => {
            return Err(CliError::Config("--coin custom needs a FILE".into()));
        }
        (Some(k @ ("hadamard" | "dft")), Some(extra)) => {
            return Err(CliError::Config(format!(
                "--coin {k} takes no file (got `{extra}`)"
            )));
        }
        (Some(other), _) => {
            return Err(CliError::Config(format!(
                "--coin: unknown kind `{other}` (expected hadamard, dft or custom FILE)"
            )));
        }
        (None, Some(_)) => unreachable!("clap fills KIND first"),
    };
    if args.phi.is_some() && !matches!(coin, CoinConfig::Hadamard { .. }) {
        return Err(CliError::Config(
            "--phi applies only to the hadamard coin".into(),
        ));
    }
    Ok(coin)
}

impl WalkConfig {
    /// Reads input files and fills in defaults; no operators are built yet.
    pub fn from_args(args: &WalkArgs) -> Result<Self, CliError> {
        let (graph_source, graph) = match (&args.cycle, &args.graph) {
            (Some(n), None) => (GraphSource::Cycle { n: *n }, PortGraph::cycle(*n)?),
            (None, Some(path)) => {
                let text = read_input(path, "graph file")?;
                let g = parse_graph_json(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                (
                    GraphSource::File {
                        path: path.display().to_string(),
                    },
                    g,
                )
            }
            _ => {
                return Err(CliError::Config(
                    "give exactly one of --cycle or --graph".into(),
                ))
            }
        };
        let coin = resolve_coin(args, &graph)?;
        let shift = args.shift.unwrap_or(match graph_source {
            GraphSource::Cycle { .. } => ShiftKind::DirectionPreserving,
            GraphSource::File { .. } => ShiftKind::PortSwap,
        });
        Ok(Self {
            graph_source,
            graph: graph.to_file(),
            coin,
            shift,
            beta: args.beta,
            vertex_dephasing: args.vertex_dephasing,
            dephasing_placement: args.dephasing_placement.into(),
            steps: args.steps,
            start: Start {
                vertex: args.start.0,
                port: args.start.1,
            },
        })
    }

    /// Validates every field and builds the operators.
    pub fn prepare(&self) -> Result<Prepared, CliError> {
        let graph = self.graph.clone().into_graph()?;
        let coin = self
            .coin
            .build(&graph)
            .map_err(|e| CliError::Config(format!("--coin: {e}")))?;
        let shift = ShiftOperator::for_graph(&graph, self.shift)
            .map_err(|e| CliError::Config(format!("--shift: {e}")))?;
        let template = StepMap::unitary(coin, shift)?;
        // zero strengths leave the step unitary so pure-state evolution applies
        let mut step = template.clone();
        if self.beta != 0.0 {
            step = step
                .with_coin_measurement(self.beta)
                .map_err(|e| CliError::Config(format!("--beta: {e}")))?;
        }
        if self.vertex_dephasing != 0.0 {
            step = step
                .with_vertex_dephasing(self.vertex_dephasing, self.dephasing_placement)
                .map_err(|e| CliError::Config(format!("--vertex-dephasing: {e}")))?;
        }
        let psi0 = PureState::basis(&graph, self.start.vertex, self.start.port)
            .map_err(|e| CliError::Config(format!("--start: {e}")))?;
        Ok(Prepared {
            config: self.clone(),
            graph,
            template,
            step,
            psi0,
        })
    }
}
