//! Coupling Hamiltonians restricted to the single-excitation subspace.
//!
//! Units: hbar = 1, energies in units of the baseline coupling `J0`, time in
//! units of `1 / J0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::HamiltonianError;
use crate::topology::{remap, IndexMap, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    /// Every coupler has weight `J0`, independent of length.
    Constant,
    /// Weight falls off with the inverse cube of the coupler length.
    Dipole,
}

impl CouplingKind {
    pub const ALL: [CouplingKind; 2] = [CouplingKind::Constant, CouplingKind::Dipole];

    pub fn name(self) -> &'static str {
        match self {
            CouplingKind::Constant => "constant",
            CouplingKind::Dipole => "dipole",
        }
    }
}

impl fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CouplingKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constant" => Ok(CouplingKind::Constant),
            "dipole" => Ok(CouplingKind::Dipole),
            other => Err(format!(
                "unknown coupling {other:?} (expected constant or dipole)"
            )),
        }
    }
}

/// Weighting law plus the baseline coupling `J0` given to the shortest edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingMode {
    kind: CouplingKind,
    j0: f64,
}

impl CouplingMode {
    pub fn new(kind: CouplingKind, j0: f64) -> Result<Self, HamiltonianError> {
        if !(j0 > 0.0 && j0 <= 1.0) {
            return Err(HamiltonianError::BadBaseline(j0));
        }
        Ok(CouplingMode { kind, j0 })
    }

    pub fn constant() -> Self {
        CouplingMode {
            kind: CouplingKind::Constant,
            j0: 1.0,
        }
    }

    pub fn dipole() -> Self {
        CouplingMode {
            kind: CouplingKind::Dipole,
            j0: 1.0,
        }
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn j0(&self) -> f64 {
        self.j0
    }
}

impl From<CouplingKind> for CouplingMode {
    fn from(kind: CouplingKind) -> Self {
        CouplingMode { kind, j0: 1.0 }
    }
}

/// Weight of a coupler of the given length.
///
/// Constant mode returns `J0`; dipole mode returns `J0 * (min_length / length)^3`.
pub fn coupling_weight(
    length: f64,
    min_length: f64,
    mode: CouplingMode,
) -> Result<f64, HamiltonianError> {
    let valid =
        length.is_finite() && min_length.is_finite() && min_length > 0.0 && length >= min_length;
    if !valid {
        return Err(HamiltonianError::BadLength { length, min_length });
    }
    Ok(match mode.kind {
        CouplingKind::Constant => mode.j0,
        CouplingKind::Dipole => mode.j0 * (min_length / length).powi(3),
    })
}

/// Dense real symmetric `n x n` matrix over the single-excitation basis.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    n: usize,
    entries: Vec<f64>,
    index: IndexMap,
}

impl HamiltonianMatrix {
    /// Wraps a row-major matrix, rejecting shape errors and asymmetry.
    pub fn from_dense(entries: Vec<f64>, index: IndexMap) -> Result<Self, HamiltonianError> {
        let n = index.len();
        if entries.len() != n * n {
            return Err(HamiltonianError::BadShape {
                expected: n * n,
                got: entries.len(),
            });
        }
        check_symmetric(n, &entries)?;
        Ok(HamiltonianMatrix { n, entries, index })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn index_map(&self) -> &IndexMap {
        &self.index
    }

    /// Infinity norm (max absolute row sum); bounds every eigenvalue.
    pub fn norm_inf(&self) -> f64 {
        self.entries
            .chunks(self.n.max(1))
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `H v` for a real or complex vector.
    pub fn apply<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
    {
        self.entries
            .chunks(self.n)
            .map(|row| {
                row.iter()
                    .zip(v)
                    .filter(|(h, _)| **h != 0.0)
                    .fold(T::default(), |acc, (&h, &x)| acc + x * h)
            })
            .collect()
    }
}

pub(crate) fn check_symmetric(n: usize, m: &[f64]) -> Result<(), HamiltonianError> {
    for i in 0..n {
        for j in (i + 1)..n {
            if m[i * n + j] != m[j * n + i] {
                return Err(HamiltonianError::NotSymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// Builds the coupling matrix of a network.
///
/// Biases are zero. Each edge `(i, j)` sets `M[i][j] = M[j][i]` to its
/// coupling weight, where the dipole law is measured against the shortest
/// edge of the network.
pub fn build_hamiltonian(
    net: &Network,
    mode: CouplingMode,
) -> Result<HamiltonianMatrix, HamiltonianError> {
    let index = remap(net)?;
    let n = index.len();
    let min_length = net.min_length().unwrap_or(1.0);
    let mut m = vec![0.0; n * n];
    for (e, (i, j)) in net.edges().iter().zip(net.index_pairs()) {
        let w = coupling_weight(e.length, min_length, mode)?;
        m[i * n + j] = w;
        m[j * n + i] = w;
    }
    Ok(HamiltonianMatrix {
        n,
        entries: m,
        index,
    })
}

/// Smallest nonzero coupling magnitude.
pub fn j_min(h: &HamiltonianMatrix) -> Result<f64, HamiltonianError> {
    let n = h.dim();
    (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| h.get(i, j).abs())
        .filter(|&w| w > 0.0)
        .reduce(f64::min)
        .ok_or(HamiltonianError::NoCoupling)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{builtin_network, BuiltinKind, Edge, NetworkKind, NodeId};

    fn sorted_nonzero(h: &HamiltonianMatrix) -> Vec<f64> {
        let mut v: Vec<f64> = h.entries().iter().copied().filter(|&x| x != 0.0).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn dipole_weights_from_tables() {
        let d = CouplingMode::dipole();
        let w = |l| coupling_weight(l, 1.0, d).unwrap();
        assert!((w(2.174) - 0.0973).abs() < 1e-4);
        assert!((w(4.592) - 0.0103).abs() < 1e-4);
        assert!((w(1.392) - 0.37075).abs() < 1e-5);
        assert_eq!(w(1.0), 1.0);
    }

    #[test]
    fn constant_ignores_length() {
        for l in [1.0, 1.5, 7.25, 100.0] {
            assert_eq!(
                coupling_weight(l, 1.0, CouplingMode::constant()).unwrap(),
                1.0
            );
        }
        let half = CouplingMode::new(CouplingKind::Constant, 0.5).unwrap();
        assert_eq!(coupling_weight(3.0, 1.0, half).unwrap(), 0.5);
    }

    #[test]
    fn invalid_lengths_and_baselines() {
        let d = CouplingMode::dipole();
        assert!(coupling_weight(0.0, 1.0, d).is_err());
        assert!(coupling_weight(-2.0, 1.0, d).is_err());
        assert!(coupling_weight(0.5, 1.0, d).is_err());
        assert!(CouplingMode::new(CouplingKind::Dipole, 0.0).is_err());
        assert!(CouplingMode::new(CouplingKind::Dipole, 1.5).is_err());
    }

    #[test]
    fn max_lengths_constant_is_adjacency() {
        let net = builtin_network(BuiltinKind::MaxLengths);
        let h = build_hamiltonian(&net, CouplingMode::constant()).unwrap();
        assert_eq!(h.dim(), 8);
        assert_eq!(sorted_nonzero(&h), vec![1.0; 16]);
        for i in 0..8 {
            assert_eq!(h.get(i, i), 0.0);
            assert_eq!(h.get(i, (i + 1) % 8), 1.0);
        }
        assert_eq!(j_min(&h).unwrap(), 1.0);
    }

    #[test]
    fn max_lengths_dipole_multiset() {
        let net = builtin_network(BuiltinKind::MaxLengths);
        let h = build_hamiltonian(&net, CouplingMode::dipole()).unwrap();
        let v = sorted_nonzero(&h);
        assert_eq!(v.len(), 16);
        let a = (1.0f64 / 2.920).powi(3);
        let b = (1.0f64 / 2.174).powi(3);
        assert!(v[..4].iter().all(|&x| x == a));
        assert!((a - 0.0402).abs() < 1e-4);
        assert!(v[4..8].iter().all(|&x| x == b));
        assert!((b - 0.0973).abs() < 1e-4);
        assert!(v[8..].iter().all(|&x| x == 1.0));
    }

    #[test]
    fn j_min_of_dipole_builtins() {
        let jm = |k| {
            j_min(&build_hamiltonian(&builtin_network(k), CouplingMode::dipole()).unwrap()).unwrap()
        };
        assert!((jm(BuiltinKind::MinMax) - 0.00426).abs() < 1e-5);
        assert!((jm(BuiltinKind::MidLengths) - 0.0149).abs() < 1e-4);
    }

    #[test]
    fn two_node_network() {
        let net = Network::new(
            vec![NodeId(0), NodeId(1)],
            vec![Edge::new(NodeId(0), NodeId(1), 1.0).unwrap()],
            None,
            NetworkKind::Custom,
        )
        .unwrap();
        let h = build_hamiltonian(&net, CouplingMode::dipole()).unwrap();
        assert_eq!(h.entries(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn j_min_needs_a_coupling() {
        let net = Network::new(vec![NodeId(0)], vec![], None, NetworkKind::Custom).unwrap();
        let h = build_hamiltonian(&net, CouplingMode::constant()).unwrap();
        assert_eq!(j_min(&h), Err(HamiltonianError::NoCoupling));
    }

    #[test]
    fn from_dense_rejects_asymmetry() {
        let idx = IndexMap::from_nodes(&[NodeId(0), NodeId(1)]).unwrap();
        assert_eq!(
            HamiltonianMatrix::from_dense(vec![0.0, 1.0, 0.5, 0.0], idx.clone()).unwrap_err(),
            HamiltonianError::NotSymmetric(0, 1)
        );
        assert!(matches!(
            HamiltonianMatrix::from_dense(vec![0.0; 3], idx),
            Err(HamiltonianError::BadShape { .. })
        ));
    }
}
