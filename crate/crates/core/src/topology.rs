//! Chimera graphs, the built-in 8-node test networks, edge classification
//! and native-ID compaction.
//!
//! Qubits use D-Wave linear numbering: qubit `q` sits in unit cell `q / 8`
//! at position `q % 8`. Cells are numbered row-major over the grid. Positions
//! 0-3 form one shore of the K(4,4) cell and couple to the same position in
//! the vertically adjacent cells; positions 4-7 form the other shore and
//! couple horizontally.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::TopologyError;

pub const QUBITS_PER_CELL: u32 = 8;
/// Qubits per shore (half a unit cell).
pub const SHORE: u32 = 4;

/// Tile pitch of the schematic layout, in layout units.
pub const TILE_WIDTH: f64 = 5.0;
/// Offset of the crossing row/column inside a tile.
pub const TILE_CENTER: f64 = 2.0;

/// Native D-Wave qubit index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn cell(self) -> u32 {
        self.0 / QUBITS_PER_CELL
    }

    pub fn position(self) -> u32 {
        self.0 % QUBITS_PER_CELL
    }

    /// 0 for positions 0-3, 1 for positions 4-7.
    pub fn shore(self) -> u32 {
        self.position() / SHORE
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Internal,
    External,
}

impl EdgeClass {
    pub fn between(a: NodeId, b: NodeId) -> Self {
        if a.cell() == b.cell() {
            EdgeClass::Internal
        } else {
            EdgeClass::External
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeClass::Internal => "internal",
            EdgeClass::External => "external",
        }
    }
}

/// Undirected coupler. `length` is dimensionless; after network construction
/// the shortest edge of the network has length 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub length: f64,
    pub class: EdgeClass,
}

impl Edge {
    pub fn new(a: NodeId, b: NodeId, length: f64) -> Result<Self, TopologyError> {
        if a == b {
            return Err(TopologyError::SelfLoop(a));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(TopologyError::BadLength { a, b, length });
        }
        Ok(Edge {
            a,
            b,
            length,
            class: EdgeClass::between(a, b),
        })
    }

    /// Endpoints with the smaller native ID first.
    pub fn key(&self) -> (NodeId, NodeId) {
        if self.a <= self.b {
            (self.a, self.b)
        } else {
            (self.b, self.a)
        }
    }
}

/// The three canonical 8-node test networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinKind {
    MaxLengths,
    MinMax,
    MidLengths,
}

impl BuiltinKind {
    pub const ALL: [BuiltinKind; 3] = [
        BuiltinKind::MaxLengths,
        BuiltinKind::MinMax,
        BuiltinKind::MidLengths,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinKind::MaxLengths => "max-lengths",
            BuiltinKind::MinMax => "min-max",
            BuiltinKind::MidLengths => "mid-lengths",
        }
    }

    /// Native label of the node that holds the excitation in the localized runs.
    pub fn injection_label(self) -> NodeId {
        match self {
            BuiltinKind::MaxLengths => NodeId(3),
            BuiltinKind::MinMax => NodeId(2),
            BuiltinKind::MidLengths => NodeId(1),
        }
    }
}

impl fmt::Display for BuiltinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max-lengths" => Ok(BuiltinKind::MaxLengths),
            "min-max" => Ok(BuiltinKind::MinMax),
            "mid-lengths" => Ok(BuiltinKind::MidLengths),
            other => Err(format!(
                "unknown network {other:?} (expected max-lengths, min-max or mid-lengths)"
            )),
        }
    }
}

/// Where a network came from; controls how CLI labels are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum NetworkKind {
    Builtin { kind: BuiltinKind },
    Chimera { rows: u32, cols: u32 },
    Custom,
}

/// Order-preserving bijection between native IDs and `0..N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexMap {
    forward: HashMap<NodeId, usize>,
    backward: Vec<NodeId>,
}

impl IndexMap {
    pub fn from_nodes(nodes: &[NodeId]) -> Result<Self, TopologyError> {
        let mut forward = HashMap::with_capacity(nodes.len());
        for (i, &n) in nodes.iter().enumerate() {
            if forward.insert(n, i).is_some() {
                return Err(TopologyError::DuplicateNode(n));
            }
        }
        Ok(IndexMap {
            forward,
            backward: nodes.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.backward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backward.is_empty()
    }

    pub fn index(&self, node: NodeId) -> Option<usize> {
        self.forward.get(&node).copied()
    }

    pub fn native(&self, index: usize) -> Option<NodeId> {
        self.backward.get(index).copied()
    }

    /// Native IDs in canonical index order.
    pub fn natives(&self) -> &[NodeId] {
        &self.backward
    }
}

/// A spin network: ordered nodes, classified edges with scaled lengths and
/// optional schematic coordinates.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<NodeId>,
    edges: Vec<Edge>,
    coords: Option<BTreeMap<NodeId, (f64, f64)>>,
    kind: NetworkKind,
    index: IndexMap,
}

impl Network {
    /// Validates the node and edge lists and rescales lengths so the shortest
    /// edge has length 1.
    pub fn new(
        nodes: Vec<NodeId>,
        mut edges: Vec<Edge>,
        coords: Option<BTreeMap<NodeId, (f64, f64)>>,
        kind: NetworkKind,
    ) -> Result<Self, TopologyError> {
        if nodes.is_empty() {
            return Err(TopologyError::Empty);
        }
        let index = IndexMap::from_nodes(&nodes)?;
        let mut seen = HashSet::with_capacity(edges.len());
        for e in &edges {
            if e.a == e.b {
                return Err(TopologyError::SelfLoop(e.a));
            }
            for end in [e.a, e.b] {
                if index.index(end).is_none() {
                    return Err(TopologyError::UnknownEndpoint(end));
                }
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(TopologyError::BadLength {
                    a: e.a,
                    b: e.b,
                    length: e.length,
                });
            }
            let expected = EdgeClass::between(e.a, e.b);
            if e.class != expected {
                return Err(TopologyError::ClassMismatch {
                    a: e.a,
                    b: e.b,
                    declared: e.class.as_str(),
                    cell_a: e.a.cell(),
                    cell_b: e.b.cell(),
                });
            }
            if !seen.insert(e.key()) {
                return Err(TopologyError::DuplicateEdge(e.a, e.b));
            }
        }
        if let Some(c) = &coords {
            for n in &nodes {
                if !c.contains_key(n) {
                    return Err(TopologyError::MissingCoordinate(*n));
                }
            }
        }
        let mut lengths: Vec<f64> = edges.iter().map(|e| e.length).collect();
        rescale_min_to_one(&mut lengths);
        for (e, l) in edges.iter_mut().zip(lengths) {
            e.length = l;
        }
        Ok(Network {
            nodes,
            edges,
            coords,
            kind,
            index,
        })
    }

    /// Builds a network whose edge lengths are the Euclidean distances between
    /// the endpoint coordinates.
    pub fn from_coords(
        nodes: Vec<NodeId>,
        pairs: &[(NodeId, NodeId)],
        coords: BTreeMap<NodeId, (f64, f64)>,
        kind: NetworkKind,
    ) -> Result<Self, TopologyError> {
        let edges = pairs
            .iter()
            .map(|&(a, b)| {
                let d = distance(&coords, a, b)?;
                Edge::new(a, b, d)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Network::new(nodes, edges, Some(coords), kind)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&BTreeMap<NodeId, (f64, f64)>> {
        self.coords.as_ref()
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    pub fn index_map(&self) -> &IndexMap {
        &self.index
    }

    pub fn index_of(&self, node: NodeId) -> Option<usize> {
        self.index.index(node)
    }

    /// Edge endpoints as canonical indices.
    pub fn index_pairs(&self) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .map(|e| (self.index.forward[&e.a], self.index.forward[&e.b]))
            .collect()
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.edges
            .iter()
            .filter(|e| e.a == node || e.b == node)
            .count()
    }

    pub fn count_class(&self, class: EdgeClass) -> usize {
        self.edges.iter().filter(|e| e.class == class).count()
    }

    pub fn min_length(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.length).reduce(f64::min)
    }

    /// The node whose excitation starts the localized runs: the designated
    /// injection node for built-ins, canonical index 0 otherwise.
    pub fn default_injection(&self) -> usize {
        match self.kind {
            NetworkKind::Builtin { kind } => self
                .index_of(kind.injection_label())
                .expect("built-in networks contain their injection node"),
            _ => 0,
        }
    }
}

fn distance(
    coords: &BTreeMap<NodeId, (f64, f64)>,
    a: NodeId,
    b: NodeId,
) -> Result<f64, TopologyError> {
    let pa = coords.get(&a).ok_or(TopologyError::MissingCoordinate(a))?;
    let pb = coords.get(&b).ok_or(TopologyError::MissingCoordinate(b))?;
    Ok((pa.0 - pb.0).hypot(pa.1 - pb.1))
}

/// Divides every length by the minimum so the shortest becomes exactly 1.
pub fn rescale_min_to_one(lengths: &mut [f64]) {
    if let Some(min) = lengths.iter().copied().reduce(f64::min) {
        if min != 1.0 {
            lengths.iter_mut().for_each(|l| *l /= min);
        }
    }
}

/// Order-preserving compaction of the network's native IDs.
pub fn remap(net: &Network) -> Result<IndexMap, TopologyError> {
    IndexMap::from_nodes(net.nodes())
}

/// Per-edge lengths, shortest rescaled to 1.
///
/// Networks carrying coordinates get fresh Euclidean distances. Networks
/// without coordinates (the built-ins and file-loaded networks) return their
/// stored lengths, which are already rescaled.
pub fn euclidean_lengths(net: &Network) -> Result<Vec<f64>, TopologyError> {
    match net.coords() {
        None => Ok(net.edges().iter().map(|e| e.length).collect()),
        Some(coords) => {
            let mut ds = net
                .edges()
                .iter()
                .map(|e| distance(coords, e.a, e.b))
                .collect::<Result<Vec<_>, _>>()?;
            rescale_min_to_one(&mut ds);
            Ok(ds)
        }
    }
}

/// Schematic position of a qubit in a Chimera grid.
///
/// Each tile is a cross: positions 0-3 lie on a horizontal row through the
/// tile centre, positions 4-7 on a vertical column, skipping the centre slot.
/// Tiles sit on a square grid of pitch [`TILE_WIDTH`]; `y` grows downwards
/// with the row index.
pub fn chimera_coordinate(node: NodeId, cols: u32) -> (f64, f64) {
    let cell = node.cell();
    let (row, col) = (cell / cols, cell % cols);
    let k = node.position() % SHORE;
    let slot = if k < 2 { k as f64 } else { (k + 1) as f64 };
    let (x0, y0) = (col as f64 * TILE_WIDTH, row as f64 * TILE_WIDTH);
    if node.shore() == 0 {
        (x0 + slot, y0 + TILE_CENTER)
    } else {
        (x0 + TILE_CENTER, y0 + slot)
    }
}

/// Chimera graph of `rows x cols` unit cells.
pub fn generate_chimera(rows: u32, cols: u32) -> Result<Network, TopologyError> {
    if rows == 0 || cols == 0 {
        return Err(TopologyError::BadGrid { rows, cols });
    }
    let per = QUBITS_PER_CELL;
    let q = |row: u32, col: u32, pos: u32| NodeId((row * cols + col) * per + pos);
    let nodes: Vec<NodeId> = (0..rows * cols * per).map(NodeId).collect();
    let mut pairs = Vec::with_capacity((rows * cols * 24) as usize);
    for row in 0..rows {
        for col in 0..cols {
            for a in 0..SHORE {
                for b in SHORE..per {
                    pairs.push((q(row, col, a), q(row, col, b)));
                }
            }
            if row + 1 < rows {
                for k in 0..SHORE {
                    pairs.push((q(row, col, k), q(row + 1, col, k)));
                }
            }
            if col + 1 < cols {
                for k in SHORE..per {
                    pairs.push((q(row, col, k), q(row, col + 1, k)));
                }
            }
        }
    }
    let coords = nodes
        .iter()
        .map(|&n| (n, chimera_coordinate(n, cols)))
        .collect();
    Network::from_coords(nodes, &pairs, coords, NetworkKind::Chimera { rows, cols })
}

// Ring lengths are listed from canonical node i to i + 1 (mod 8).
const MAX_LENGTHS_LABELS: [u32; 8] = [3, 7, 15, 11, 27, 31, 23, 19];
const MAX_LENGTHS_RING: [f64; 8] = [1.000, 2.920, 1.000, 2.174, 1.000, 2.920, 1.000, 2.174];
const MIN_MAX_LABELS: [u32; 8] = [2, 6, 14, 9, 25, 29, 21, 18];
const MIN_MAX_RING: [f64; 8] = [1.000, 6.168, 1.000, 4.592, 1.000, 6.168, 1.000, 4.592];
const MID_LENGTHS_LABELS: [u32; 8] = [1, 3, 4, 7, 8, 10, 12, 15];
const MID_LENGTHS_EDGES: [(u32, u32, f64); 10] = [
    (1, 4, 1.000),
    (1, 7, 1.000),
    (3, 4, 1.392),
    (3, 7, 1.392),
    (4, 12, 4.064),
    (7, 15, 4.064),
    (8, 12, 1.392),
    (8, 15, 1.392),
    (10, 12, 1.000),
    (10, 15, 1.000),
];

/// One of the three 8-node test networks on a 2x2 Chimera grid.
///
/// Nodes carry the native labels of the 2x2 grid, listed in canonical order
/// with the injection node first. Lengths are stored directly; these networks
/// carry no coordinates.
pub fn builtin_network(kind: BuiltinKind) -> Network {
    let (labels, edges): (&[u32], Vec<(u32, u32, f64)>) = match kind {
        BuiltinKind::MaxLengths => (
            &MAX_LENGTHS_LABELS,
            ring(&MAX_LENGTHS_LABELS, &MAX_LENGTHS_RING),
        ),
        BuiltinKind::MinMax => (&MIN_MAX_LABELS, ring(&MIN_MAX_LABELS, &MIN_MAX_RING)),
        BuiltinKind::MidLengths => (&MID_LENGTHS_LABELS, MID_LENGTHS_EDGES.to_vec()),
    };
    let nodes = labels.iter().copied().map(NodeId).collect();
    let edges = edges
        .into_iter()
        .map(|(a, b, l)| Edge::new(NodeId(a), NodeId(b), l).expect("valid built-in edge"))
        .collect();
    Network::new(nodes, edges, None, NetworkKind::Builtin { kind })
        .expect("built-in networks are well formed")
}

fn ring(labels: &[u32; 8], lengths: &[f64; 8]) -> Vec<(u32, u32, f64)> {
    (0..8)
        .map(|i| (labels[i], labels[(i + 1) % 8], lengths[i]))
        .collect()
}
