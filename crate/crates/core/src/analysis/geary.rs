//! Geary's C with binary weights: `w_ij = 1` for every ordered pair of
//! connected nodes, 0 otherwise.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::AnalysisError;
use crate::exec::Exec;
use crate::ingest::{Parameter, QubitDataset};
use crate::topology::{EdgeClass, Network, NodeId};

/// Relative deviation from the all-edges value above which a subset's C is
/// flagged as strong.
pub const STRONG_DEVIATION: f64 = 0.10;

/// Which couplers contribute weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    All,
    Internal,
    External,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::All, Subset::Internal, Subset::External];

    pub fn name(self) -> &'static str {
        match self {
            Subset::All => "all",
            Subset::Internal => "internal",
            Subset::External => "external",
        }
    }

    pub fn admits(self, class: EdgeClass) -> bool {
        match self {
            Subset::All => true,
            Subset::Internal => class == EdgeClass::Internal,
            Subset::External => class == EdgeClass::External,
        }
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Subset::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown subset {s:?} (expected all, internal or external)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GearyStatistic {
    pub c: f64,
    /// Observations in the node statistics.
    pub n: usize,
    /// Distinct undirected edges with both endpoints observed.
    pub edges_used: usize,
    /// `sum_i sum_j w_ij` (twice `edges_used`).
    pub weight_sum: f64,
}

type Prepared = (Vec<f64>, Vec<(usize, usize)>);

/// Values in node order plus deduplicated index pairs `i < j`.
fn prepare(
    values: &BTreeMap<NodeId, f64>,
    edges: &[(NodeId, NodeId)],
) -> Result<Prepared, AnalysisError> {
    if values.len() < 2 {
        return Err(AnalysisError::TooFewObservations(values.len()));
    }
    let index: BTreeMap<NodeId, usize> = values.keys().enumerate().map(|(i, &k)| (k, i)).collect();
    let mut pairs: Vec<(usize, usize)> = edges
        .iter()
        .filter_map(|(a, b)| Some((*index.get(a)?, *index.get(b)?)))
        .filter(|(i, j)| i != j)
        .map(|(i, j)| (i.min(j), i.max(j)))
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    if pairs.is_empty() {
        return Err(AnalysisError::NoUsableEdges);
    }
    Ok((values.values().copied().collect(), pairs))
}

fn geary_core(xs: &[f64], pairs: &[(usize, usize)]) -> Result<GearyStatistic, AnalysisError> {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let spread: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if spread <= n as f64 * (4.0 * f64::EPSILON * scale).powi(2) {
        return Err(AnalysisError::ZeroVariance);
    }
    // each undirected edge stands for the two ordered pairs (i, j) and (j, i)
    let cross: f64 = pairs
        .iter()
        .map(|&(i, j)| 2.0 * (xs[i] - xs[j]).powi(2))
        .sum();
    let weight_sum = 2.0 * pairs.len() as f64;
    Ok(GearyStatistic {
        c: (n as f64 - 1.0) * cross / (2.0 * spread * weight_sum),
        n,
        edges_used: pairs.len(),
        weight_sum,
    })
}

/// Geary's C of `values` over the graph given by `edges`.
///
/// The node count, mean and variance run over every entry of `values`; edges
/// with an endpoint missing from `values` are dropped, as are self-loops and
/// repeated edges.
pub fn gearys_c(
    values: &BTreeMap<NodeId, f64>,
    edges: &[(NodeId, NodeId)],
) -> Result<GearyStatistic, AnalysisError> {
    let (xs, pairs) = prepare(values, edges)?;
    geary_core(&xs, &pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullSummary {
    pub mean: f64,
    pub std_error: f64,
    pub shuffles: usize,
}

/// Geary's C under random relabelling of the values over the nodes.
///
/// Shuffle `k` draws from a ChaCha8 stream `k` of `seed`, so the result does
/// not depend on evaluation order.
pub fn geary_permutation_null(
    values: &BTreeMap<NodeId, f64>,
    edges: &[(NodeId, NodeId)],
    shuffles: usize,
    seed: u64,
    exec: Exec,
) -> Result<NullSummary, AnalysisError> {
    let (xs, pairs) = prepare(values, edges)?;
    geary_core(&xs, &pairs)?;
    let cs = exec.map_indexed(shuffles, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut perm = xs.clone();
        perm.shuffle(&mut rng);
        geary_core(&perm, &pairs).map(|s| s.c).unwrap_or(f64::NAN)
    });
    let m = cs.len() as f64;
    let mean = cs.iter().sum::<f64>() / m;
    let var = cs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok(NullSummary {
        mean,
        std_error: (var / m).sqrt(),
        shuffles,
    })
}

/// One cell of the parameter x subset table.
#[derive(Debug, Clone, PartialEq)]
pub struct GearyResult {
    pub parameter: Parameter,
    pub subset: Subset,
    pub outcome: Result<GearyStatistic, AnalysisError>,
    /// Internal/external value deviates from the all-edges value by more
    /// than [`STRONG_DEVIATION`] (relative).
    pub strong: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GearyTable {
    pub cells: Vec<GearyResult>,
}

impl GearyTable {
    pub fn get(&self, parameter: Parameter, subset: Subset) -> &GearyResult {
        self.cells
            .iter()
            .find(|c| c.parameter == parameter && c.subset == subset)
            .expect("table holds every parameter/subset pair")
    }
}

pub fn geary_table(data: &QubitDataset, net: &Network) -> Result<GearyTable, AnalysisError> {
    geary_table_with(data, net, Exec::default())
}

/// Geary's C for the four parameters over all, internal and external
/// couplers. Node statistics always use the whole dataset; only the weights
/// change between subsets.
pub fn geary_table_with(
    data: &QubitDataset,
    net: &Network,
    exec: Exec,
) -> Result<GearyTable, AnalysisError> {
    if let Some(r) = data.records().find(|r| net.index_of(r.qubit).is_none()) {
        return Err(AnalysisError::ForeignQubit(r.qubit));
    }
    let edges_of = |s: Subset| -> Vec<(NodeId, NodeId)> {
        net.edges()
            .iter()
            .filter(|e| s.admits(e.class))
            .map(|e| (e.a, e.b))
            .collect()
    };
    let edge_sets: Vec<_> = Subset::ALL.iter().map(|&s| edges_of(s)).collect();
    let values: Vec<_> = Parameter::ALL.iter().map(|&p| data.values(p)).collect();
    let grid: Vec<(usize, usize)> = (0..Parameter::ALL.len())
        .flat_map(|p| (0..Subset::ALL.len()).map(move |s| (p, s)))
        .collect();
    let outcomes = exec.map_indexed(grid.len(), |k| {
        let (p, s) = grid[k];
        gearys_c(&values[p], &edge_sets[s])
    });
    let mut cells: Vec<GearyResult> = grid
        .iter()
        .zip(outcomes)
        .map(|(&(p, s), outcome)| GearyResult {
            parameter: Parameter::ALL[p],
            subset: Subset::ALL[s],
            outcome,
            strong: false,
        })
        .collect();
    for chunk in cells.chunks_mut(Subset::ALL.len()) {
        let all = chunk[0].outcome.as_ref().ok().map(|s| s.c);
        for cell in &mut chunk[1..] {
            if let (Some(all), Ok(stat)) = (all, &cell.outcome) {
                cell.strong = (stat.c - all).abs() > STRONG_DEVIATION * all.abs();
            }
        }
    }
    Ok(GearyTable { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::QubitRecord;
    use crate::topology::generate_chimera;

    fn vals(v: &[(u32, f64)]) -> BTreeMap<NodeId, f64> {
        v.iter().map(|&(k, x)| (NodeId(k), x)).collect()
    }

    fn e(a: u32, b: u32) -> (NodeId, NodeId) {
        (NodeId(a), NodeId(b))
    }

    #[test]
    fn path_graph_is_one_half() {
        let s = gearys_c(&vals(&[(0, 1.0), (1, 2.0), (2, 3.0)]), &[e(0, 1), e(1, 2)]).unwrap();
        assert!((s.c - 0.5).abs() < 1e-15);
        assert_eq!(s.edges_used, 2);
        assert_eq!(s.weight_sum, 4.0);
    }

    #[test]
    fn equal_connected_values_give_zero() {
        let s = gearys_c(
            &vals(&[(0, 0.0), (1, 0.0), (2, 1.0), (3, 1.0)]),
            &[e(0, 1), e(2, 3)],
        )
        .unwrap();
        assert_eq!(s.c, 0.0);
    }

    #[test]
    fn single_edge_is_one() {
        let s = gearys_c(&vals(&[(0, 0.0), (1, 1.0)]), &[e(0, 1)]).unwrap();
        assert!((s.c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn error_cases() {
        assert_eq!(
            gearys_c(&vals(&[(0, 0.1), (1, 0.1), (2, 0.1)]), &[e(0, 1)]),
            Err(AnalysisError::ZeroVariance)
        );
        assert_eq!(
            gearys_c(&vals(&[(0, 0.0), (1, 1.0)]), &[e(0, 5)]),
            Err(AnalysisError::NoUsableEdges)
        );
        assert_eq!(
            gearys_c(&vals(&[(0, 0.0)]), &[e(0, 1)]),
            Err(AnalysisError::TooFewObservations(1))
        );
    }

    #[test]
    fn duplicate_and_reversed_edges_collapse() {
        let v = vals(&[(0, 1.0), (1, 2.0), (2, 3.0)]);
        let a = gearys_c(&v, &[e(0, 1), e(1, 2)]).unwrap();
        let b = gearys_c(&v, &[e(2, 1), e(1, 0), e(0, 1), e(1, 1)]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_endpoint_drops_edge() {
        let v = vals(&[(0, 1.0), (1, 2.0), (2, 3.0)]);
        let s = gearys_c(&v, &[e(0, 1), e(1, 2), e(2, 9)]).unwrap();
        assert_eq!(s.edges_used, 2);
    }

    #[test]
    fn table_shape_and_strong_flags() {
        let net = generate_chimera(2, 2).unwrap();
        // shore value depends on position only: internal pairs always span
        // the two shores, external pairs share a position
        let recs = net
            .nodes()
            .iter()
            .map(|&q| {
                let x = if q.shore() == 0 { 1.0 } else { -1.0 } + 0.01 * q.position() as f64;
                QubitRecord {
                    qubit: q,
                    beta: x,
                    b: x,
                    gamma: x,
                    eta: x,
                }
            })
            .collect();
        let data = QubitDataset::from_records(recs, "syn", 2048).unwrap();
        let t = geary_table(&data, &net).unwrap();
        assert_eq!(t.cells.len(), 12);
        let ext = t
            .get(Parameter::Beta, Subset::External)
            .outcome
            .clone()
            .unwrap();
        let int = t
            .get(Parameter::Beta, Subset::Internal)
            .outcome
            .clone()
            .unwrap();
        assert_eq!(ext.c, 0.0);
        assert!(int.c > 1.0);
        assert!(t.get(Parameter::Beta, Subset::External).strong);
        assert!(!t.get(Parameter::Beta, Subset::All).strong);
    }

    #[test]
    fn foreign_qubits_are_rejected() {
        let net = generate_chimera(1, 1).unwrap();
        let recs = vec![
            QubitRecord {
                qubit: NodeId(0),
                beta: 0.0,
                b: 0.0,
                gamma: 0.0,
                eta: 0.0,
            },
            QubitRecord {
                qubit: NodeId(99),
                beta: 1.0,
                b: 1.0,
                gamma: 1.0,
                eta: 1.0,
            },
        ];
        let data = QubitDataset::from_records(recs, "syn", 2048).unwrap();
        assert_eq!(
            geary_table(&data, &net).unwrap_err(),
            AnalysisError::ForeignQubit(NodeId(99))
        );
    }

    #[test]
    fn null_is_schedule_independent() {
        let net = generate_chimera(2, 2).unwrap();
        let v: BTreeMap<NodeId, f64> = net
            .nodes()
            .iter()
            .map(|&q| (q, ((q.0 * 7919) % 101) as f64))
            .collect();
        let edges: Vec<_> = net.edges().iter().map(|e| (e.a, e.b)).collect();
        let a = geary_permutation_null(&v, &edges, 200, 42, Exec::Sequential).unwrap();
        let b = geary_permutation_null(&v, &edges, 200, 42, Exec::Parallel).unwrap();
        assert_eq!(a, b);
        let c = geary_permutation_null(&v, &edges, 200, 43, Exec::Sequential).unwrap();
        assert_ne!(a.mean, c.mean);
    }
}
