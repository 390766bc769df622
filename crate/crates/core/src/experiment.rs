//! Resolving run configurations into simulated traces.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dynamics::{fidelity_trace_with, FidelityTrace, InitialCondition};
use crate::error::{Error, TopologyError};
use crate::exec::Exec;
use crate::hamiltonian::{build_hamiltonian, j_min, CouplingKind, CouplingMode, HamiltonianMatrix};
use crate::output::{NetworkDocument, TraceMetadata};
use crate::topology::{
    builtin_network, generate_chimera, BuiltinKind, Network, NetworkKind, NodeId,
};

/// `max-lengths | min-max | mid-lengths | chimera:<rows>x<cols> | file:<path>`.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSelector {
    Builtin(BuiltinKind),
    Chimera { rows: u32, cols: u32 },
    File(PathBuf),
}

impl NetworkSelector {
    pub fn load(&self) -> Result<Network, Error> {
        match self {
            NetworkSelector::Builtin(kind) => Ok(builtin_network(*kind)),
            NetworkSelector::Chimera { rows, cols } => Ok(generate_chimera(*rows, *cols)?),
            NetworkSelector::File(path) => {
                let text = std::fs::read_to_string(path)?;
                let doc: NetworkDocument = serde_json::from_str(&text)?;
                Ok(doc.into_network()?)
            }
        }
    }
}

impl fmt::Display for NetworkSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetworkSelector::Builtin(k) => write!(f, "{k}"),
            NetworkSelector::Chimera { rows, cols } => write!(f, "chimera:{rows}x{cols}"),
            NetworkSelector::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for NetworkSelector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(path) = s.strip_prefix("file:") {
            if path.is_empty() {
                return Err("file: selector needs a path".into());
            }
            return Ok(NetworkSelector::File(PathBuf::from(path)));
        }
        if let Some(dims) = s.strip_prefix("chimera:") {
            let parsed = dims
                .split_once('x')
                .and_then(|(r, c)| Some((r.parse::<u32>().ok()?, c.parse::<u32>().ok()?)))
                .filter(|&(r, c)| r > 0 && c > 0);
            return parsed
                .map(|(rows, cols)| NetworkSelector::Chimera { rows, cols })
                .ok_or_else(|| format!("invalid chimera size {dims:?} (expected <rows>x<cols>)"));
        }
        s.parse()
            .map(NetworkSelector::Builtin)
            .map_err(|e: String| format!("{e}; also accepted: chimera:<rows>x<cols>, file:<path>"))
    }
}

/// `localized`, `localized:<label>` or `superposition`.
///
/// Labels are native IDs for built-in and Chimera networks and canonical
/// indices for file-loaded networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialSpec {
    Localized(Option<u32>),
    Superposition,
}

impl InitialSpec {
    pub fn resolve(self, net: &Network) -> Result<InitialCondition, TopologyError> {
        match self {
            InitialSpec::Superposition => Ok(InitialCondition::Superposition),
            InitialSpec::Localized(None) => Ok(InitialCondition::Localized {
                site: net.default_injection(),
            }),
            InitialSpec::Localized(Some(label)) => {
                let site = match net.kind() {
                    NetworkKind::Custom => Some(label as usize).filter(|&i| i < net.len()),
                    _ => net.index_of(NodeId(label)),
                };
                site.map(|site| InitialCondition::Localized { site })
                    .ok_or(TopologyError::UnknownNode(NodeId(label)))
            }
        }
    }
}

impl FromStr for InitialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "superposition" => Ok(InitialSpec::Superposition),
            "localized" => Ok(InitialSpec::Localized(None)),
            _ => s
                .strip_prefix("localized:")
                .and_then(|v| v.parse().ok())
                .map(|v| InitialSpec::Localized(Some(v)))
                .ok_or_else(|| {
                    format!(
                        "invalid initial state {s:?} (expected superposition, localized or localized:<label>)"
                    )
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub network: NetworkSelector,
    pub coupling: CouplingMode,
    pub initial: InitialSpec,
    pub samples: usize,
}

/// Everything produced by one simulation.
#[derive(Debug, Clone)]
pub struct Run {
    pub network: Network,
    pub hamiltonian: HamiltonianMatrix,
    pub j_min: f64,
    pub trace: FidelityTrace,
    pub metadata: TraceMetadata,
}

impl Run {
    /// Native labels in canonical order.
    pub fn labels(&self) -> &[NodeId] {
        self.network.nodes()
    }
}

fn describe(initial: InitialCondition, labels: &[NodeId]) -> String {
    match initial {
        InitialCondition::Localized { site } => format!("localized:{}", labels[site]),
        InitialCondition::Superposition => "superposition".into(),
        InitialCondition::Custom => "custom".into(),
    }
}

pub fn run(cfg: &RunConfig, exec: Exec) -> Result<Run, Error> {
    let network = cfg.network.load()?;
    run_on(network, &cfg.network.to_string(), cfg, exec)
}

/// Simulates an already loaded network.
pub fn run_on(network: Network, name: &str, cfg: &RunConfig, exec: Exec) -> Result<Run, Error> {
    let hamiltonian = build_hamiltonian(&network, cfg.coupling)?;
    let jm = j_min(&hamiltonian)?;
    let initial = cfg.initial.resolve(&network)?;
    let psi0 = initial.state(network.len())?;
    let trace = fidelity_trace_with(&hamiltonian, &psi0, cfg.samples, exec)?.with_initial(initial);
    let metadata = TraceMetadata {
        network: name.to_string(),
        coupling: cfg.coupling.kind().to_string(),
        j0: cfg.coupling.j0(),
        initial: describe(initial, network.nodes()),
        j_min: jm,
        t_max: trace.t_max(),
        samples: cfg.samples,
    };
    Ok(Run {
        network,
        hamiltonian,
        j_min: jm,
        trace,
        metadata,
    })
}

/// The twelve cells of the experiment grid: built-in network x coupling x
/// initial state, in that nesting order.
pub fn grid_configs(samples: usize) -> Vec<RunConfig> {
    let mut out = Vec::with_capacity(12);
    for kind in BuiltinKind::ALL {
        for coupling in CouplingKind::ALL {
            for initial in [InitialSpec::Localized(None), InitialSpec::Superposition] {
                out.push(RunConfig {
                    network: NetworkSelector::Builtin(kind),
                    coupling: coupling.into(),
                    initial,
                    samples,
                });
            }
        }
    }
    out
}

/// Runs the whole grid; cells are independent and may run concurrently.
/// Each trace is sampled sequentially inside its cell.
pub fn run_grid(samples: usize, exec: Exec) -> Result<Vec<Run>, Error> {
    let cfgs = grid_configs(samples);
    exec.map_indexed(cfgs.len(), |k| run(&cfgs[k], Exec::Sequential))
        .into_iter()
        .collect()
}
