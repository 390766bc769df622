use thiserror::Error;

use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("malformed network: duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("malformed network: duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("malformed network: self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("malformed network: edge endpoint {0} is not a node")]
    UnknownEndpoint(NodeId),
    #[error("malformed network: edge ({a}, {b}) has non-positive or non-finite length {length}")]
    BadLength { a: NodeId, b: NodeId, length: f64 },
    #[error("malformed network: edge ({a}, {b}) is labelled {declared} but joins cells {cell_a} and {cell_b}")]
    ClassMismatch {
        a: NodeId,
        b: NodeId,
        declared: &'static str,
        cell_a: u32,
        cell_b: u32,
    },
    #[error("missing coordinate for node {0}")]
    MissingCoordinate(NodeId),
    #[error("network has no nodes")]
    Empty,
    #[error("chimera grid must have at least one row and one column (got {rows}x{cols})")]
    BadGrid { rows: u32, cols: u32 },
    #[error("node {0} is not in the network")]
    UnknownNode(NodeId),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("coupling baseline J0 must lie in (0, 1], got {0}")]
    BadBaseline(f64),
    #[error("invalid edge length {length} (minimum length {min_length})")]
    BadLength { length: f64, min_length: f64 },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix has {got} entries, expected {expected}")]
    BadShape { expected: usize, got: usize },
    #[error("hamiltonian has no nonzero coupling")]
    NoCoupling,
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("site {site} out of range for dimension {n}")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("state norm is {0}, expected 1")]
    NotNormalized(f64),
    #[error("state dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("time window end must be positive and finite, got {0}")]
    BadWindow(f64),
    #[error("jacobi eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no fidelity peak in the time window")]
    NoPeak,
    #[error("zero variance: Geary's C is undefined")]
    ZeroVariance,
    #[error("no usable edges: both endpoints of at least one edge need values")]
    NoUsableEdges,
    #[error("at least 2 observations are required, got {0}")]
    TooFewObservations(usize),
    #[error("fidelity {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },
    #[error("trace has {trace} columns but the network has {network} nodes")]
    ShapeMismatch { trace: usize, network: usize },
    #[error("dataset qubit {0} is not a node of the network")]
    ForeignQubit(NodeId),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("time {0} is outside the trace window")]
    TimeOutOfWindow(f64),
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{source_name}: malformed header {found:?}, expected \"qubit_id,beta,b,gamma,eta\"")]
    BadHeader { source_name: String, found: String },
    #[error("{source_name}: {location}: {message}")]
    BadRow {
        source_name: String,
        location: String,
        message: String,
    },
    #[error("{source_name}: {location}: duplicate qubit_id {qubit}")]
    Duplicate {
        source_name: String,
        location: String,
        qubit: u32,
    },
    #[error("{source_name}: {location}: qubit_id {qubit} outside chip of {chip} qubits")]
    OutOfRange {
        source_name: String,
        location: String,
        qubit: u32,
        chip: u32,
    },
    #[error("{0}: dataset is empty")]
    Empty(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Crate-level error; every module error converts into it.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
