//! Exact single-excitation time evolution.
//!
//! The state is expanded in the eigenbasis of the coupling matrix, so each
//! sample time is computed directly from the initial state:
//! `psi(t) = sum_k exp(-i E_k t) <v_k|psi0> v_k` (hbar = 1). A fixed-step RK4
//! integrator is kept alongside as an independent cross-check.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DynamicsError, HamiltonianError};
use crate::exec::Exec;
use crate::hamiltonian::{check_symmetric, j_min, HamiltonianMatrix};

/// Tolerance on `|sum |a_i|^2 - 1|` accepted by [`QuantumState::new`].
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Samples per trace unless the caller asks otherwise.
pub const DEFAULT_SAMPLES: usize = 2001;

const MAX_SWEEPS: usize = 64;
const JACOBI_REL_TOL: f64 = 1e-12;

/// Amplitudes over the single-excitation site basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amps: Vec<Complex64>,
}

impl QuantumState {
    /// Wraps amplitudes that already have unit norm.
    pub fn new(amps: Vec<Complex64>) -> Result<Self, DynamicsError> {
        if amps.is_empty() {
            return Err(DynamicsError::ZeroDimension);
        }
        let s = QuantumState { amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs().is_nan() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(DynamicsError::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|<i|psi>|^2` for every site.
    pub fn fidelities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest componentwise `|a_i - b_i|`.
    pub fn max_abs_diff(&self, other: &QuantumState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Excitation localized on `site`.
pub fn localized_state(n: usize, site: usize) -> Result<QuantumState, DynamicsError> {
    if site >= n {
        return Err(DynamicsError::SiteOutOfRange { site, n });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); n];
    amps[site] = Complex64::new(1.0, 0.0);
    Ok(QuantumState { amps })
}

/// Equal superposition of every localized excitation.
pub fn superposition_state(n: usize) -> Result<QuantumState, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::ZeroDimension);
    }
    let a = 1.0 / (n as f64).sqrt();
    Ok(QuantumState {
        amps: vec![Complex64::new(a, 0.0); n],
    })
}

/// How a trace's initial state was prepared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum InitialCondition {
    Localized { site: usize },
    Superposition,
    Custom,
}

impl InitialCondition {
    pub fn state(self, n: usize) -> Result<QuantumState, DynamicsError> {
        match self {
            InitialCondition::Localized { site } => localized_state(n, site),
            InitialCondition::Superposition | InitialCondition::Custom => superposition_state(n),
        }
    }

    /// The node excluded from peak searches.
    pub fn injection_site(self) -> Option<usize> {
        match self {
            InitialCondition::Localized { site } => Some(site),
            _ => None,
        }
    }
}

/// Eigenvalues ascending with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    values: Vec<f64>,
    // vectors[k * n + i] is component i of eigenvector k
    vectors: Vec<f64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.n..(k + 1) * self.n]
    }

    /// Max-entry error of `V diag(E) V^T` against `m` (row-major).
    pub fn reconstruction_error(&self, m: &[f64]) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| self.values[k] * self.vectors[k * n + i] * self.vectors[k * n + j])
                    .sum();
                worst = worst.max((r - m[i * n + j]).abs());
            }
        }
        worst
    }

    /// Max-entry error of `V^T V` against the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = self
                    .eigenvector(a)
                    .iter()
                    .zip(self.eigenvector(b))
                    .map(|(x, y)| x * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub fn eigendecompose(h: &HamiltonianMatrix) -> Result<Spectrum, DynamicsError> {
    symmetric_eigen(h.dim(), h.entries())
}

/// Cyclic Jacobi eigendecomposition of a dense real symmetric matrix.
///
/// Sweeps rotate pairs `(p, q)` in row order until the largest off-diagonal
/// entry is below `1e-12 * ||m||_F`. The sweep order is fixed, so identical
/// input gives bit-identical output. Eigenvectors are signed so their first
/// non-negligible component is positive.
pub fn symmetric_eigen(n: usize, m: &[f64]) -> Result<Spectrum, DynamicsError> {
    if m.len() != n * n {
        return Err(HamiltonianError::BadShape {
            expected: n * n,
            got: m.len(),
        }
        .into());
    }
    check_symmetric(n, m)?;
    let mut a = m.to_vec();
    // v is row-major; column k holds eigenvector k
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_REL_TOL * frob;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p * n + q].abs())
            .fold(0.0, f64::max);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(DynamicsError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]).then(x.cmp(&y)));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        let mut col: Vec<f64> = (0..n).map(|i| v[i * n + k]).collect();
        if let Some(lead) = col.iter().copied().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
            }
        }
        vectors.extend(col);
    }
    Ok(Spectrum { n, values, vectors })
}

/// Precomputed eigen-expansion of one initial state.
#[derive(Debug, Clone)]
pub struct Propagator<'a> {
    spectrum: &'a Spectrum,
    coeffs: Vec<Complex64>,
}

impl<'a> Propagator<'a> {
    pub fn new(spectrum: &'a Spectrum, psi0: &QuantumState) -> Result<Self, DynamicsError> {
        if psi0.dim() != spectrum.n {
            return Err(DynamicsError::DimensionMismatch {
                expected: spectrum.n,
                got: psi0.dim(),
            });
        }
        let coeffs = (0..spectrum.n)
            .map(|k| {
                spectrum
                    .eigenvector(k)
                    .iter()
                    .zip(psi0.amplitudes())
                    .map(|(&v, &a)| a * v)
                    .sum()
            })
            .collect();
        Ok(Propagator { spectrum, coeffs })
    }

    pub fn state_at(&self, t: f64) -> QuantumState {
        let n = self.spectrum.n;
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        for (k, (&e, &c)) in self.spectrum.values.iter().zip(&self.coeffs).enumerate() {
            let w = Complex64::from_polar(1.0, -e * t) * c;
            for (amp, &v) in amps.iter_mut().zip(self.spectrum.eigenvector(k)) {
                *amp += w * v;
            }
        }
        QuantumState { amps }
    }
}

/// State at time `t` evolved from `psi0`.
pub fn evolve(
    spectrum: &Spectrum,
    psi0: &QuantumState,
    t: f64,
) -> Result<QuantumState, DynamicsError> {
    Ok(Propagator::new(spectrum, psi0)?.state_at(t))
}

/// `<psi|H|psi>`.
pub fn energy(h: &HamiltonianMatrix, psi: &QuantumState) -> f64 {
    let hp = h.apply(psi.amplitudes());
    psi.amplitudes()
        .iter()
        .zip(&hp)
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}

/// Node fidelities sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    times: Vec<f64>,
    fidelities: Vec<Vec<f64>>,
    initial: InitialCondition,
    t_max: f64,
}

impl FidelityTrace {
    /// Builds a trace from explicit rows. Times must be strictly increasing and
    /// every row must have the same width.
    pub fn new(
        times: Vec<f64>,
        fidelities: Vec<Vec<f64>>,
        initial: InitialCondition,
    ) -> Result<Self, DynamicsError> {
        if times.len() < 2 {
            return Err(DynamicsError::TooFewSamples(times.len()));
        }
        if times.len() != fidelities.len() {
            return Err(DynamicsError::DimensionMismatch {
                expected: times.len(),
                got: fidelities.len(),
            });
        }
        let width = fidelities[0].len();
        if width == 0 {
            return Err(DynamicsError::ZeroDimension);
        }
        if let Some(row) = fidelities.iter().find(|r| r.len() != width) {
            return Err(DynamicsError::DimensionMismatch {
                expected: width,
                got: row.len(),
            });
        }
        if times
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(DynamicsError::BadWindow(times[times.len() - 1]));
        }
        let t_max = times[times.len() - 1];
        Ok(FidelityTrace {
            times,
            fidelities,
            initial,
            t_max,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Rows indexed by sample, columns by canonical node index.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.fidelities
    }

    pub fn node_series(&self, node: usize) -> Vec<f64> {
        self.fidelities.iter().map(|r| r[node]).collect()
    }

    pub fn samples(&self) -> usize {
        self.times.len()
    }

    pub fn nodes(&self) -> usize {
        self.fidelities[0].len()
    }

    pub fn initial(&self) -> InitialCondition {
        self.initial
    }

    pub fn with_initial(mut self, initial: InitialCondition) -> Self {
        self.initial = initial;
        self
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Index of the grid sample closest to `t` (earlier sample on ties).
    pub fn nearest_sample(&self, t: f64) -> usize {
        let k = self.times.partition_point(|&x| x < t);
        if k == 0 {
            0
        } else if k == self.times.len() || (t - self.times[k - 1]) <= (self.times[k] - t) {
            k - 1
        } else {
            k
        }
    }

    /// Sup-norm distance between the series of two nodes.
    pub fn series_distance(&self, a: usize, b: usize) -> f64 {
        self.fidelities
            .iter()
            .map(|r| (r[a] - r[b]).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|sum_i f_i(t) - 1|` over the grid.
    pub fn max_norm_error(&self) -> f64 {
        self.fidelities
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Samples `|<i|psi(t)>|^2` on `samples` uniform times spanning `[0, 1 / J_min]`.
pub fn fidelity_trace(
    h: &HamiltonianMatrix,
    psi0: &QuantumState,
    samples: usize,
) -> Result<FidelityTrace, DynamicsError> {
    fidelity_trace_with(h, psi0, samples, Exec::default())
}

pub fn fidelity_trace_with(
    h: &HamiltonianMatrix,
    psi0: &QuantumState,
    samples: usize,
    exec: Exec,
) -> Result<FidelityTrace, DynamicsError> {
    let t_max = 1.0 / j_min(h)?;
    let spectrum = eigendecompose(h)?;
    fidelity_trace_window(&spectrum, psi0, t_max, samples, exec)
}

/// Samples fidelities on `samples` uniform times spanning `[0, t_end]`.
pub fn fidelity_trace_window(
    spectrum: &Spectrum,
    psi0: &QuantumState,
    t_end: f64,
    samples: usize,
    exec: Exec,
) -> Result<FidelityTrace, DynamicsError> {
    if samples < 2 {
        return Err(DynamicsError::TooFewSamples(samples));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(DynamicsError::BadWindow(t_end));
    }
    let prop = Propagator::new(spectrum, psi0)?;
    let last = (samples - 1) as f64;
    let times: Vec<f64> = (0..samples).map(|k| t_end * (k as f64 / last)).collect();
    let fidelities = exec.map_indexed(samples, |k| prop.state_at(times[k]).fidelities());
    Ok(FidelityTrace {
        times,
        fidelities,
        initial: InitialCondition::Custom,
        t_max: t_end,
    })
}

fn schrodinger_rhs(h: &HamiltonianMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    let minus_i = Complex64::new(0.0, -1.0);
    h.apply(psi).into_iter().map(|x| x * minus_i).collect()
}

fn rk4_step(h: &HamiltonianMatrix, psi: &mut [Complex64], dt: f64) {
    let axpy = |y: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        y.iter().zip(k).map(|(a, b)| a + b * s).collect()
    };
    let k1 = schrodinger_rhs(h, psi);
    let k2 = schrodinger_rhs(h, &axpy(psi, &k1, dt / 2.0));
    let k3 = schrodinger_rhs(h, &axpy(psi, &k2, dt / 2.0));
    let k4 = schrodinger_rhs(h, &axpy(psi, &k3, dt));
    for (i, p) in psi.iter_mut().enumerate() {
        *p += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
    }
}

/// Classical fixed-step RK4 integration of `i dpsi/dt = H psi` up to `t`.
///
/// The interval is split into `ceil(|t| / step)` equal steps. Used only as a
/// verification oracle for [`evolve`].
pub fn rk4_evolve(
    h: &HamiltonianMatrix,
    psi0: &QuantumState,
    t: f64,
    step: f64,
) -> Result<QuantumState, DynamicsError> {
    Ok(rk4_checkpoints(h, psi0, &[t], step)?.remove(0))
}

/// RK4 states at each of the increasing `times`, integrating continuously
/// from `t = 0` through every checkpoint.
pub fn rk4_checkpoints(
    h: &HamiltonianMatrix,
    psi0: &QuantumState,
    times: &[f64],
    step: f64,
) -> Result<Vec<QuantumState>, DynamicsError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(DynamicsError::BadStep(step));
    }
    if psi0.dim() != h.dim() {
        return Err(DynamicsError::DimensionMismatch {
            expected: h.dim(),
            got: psi0.dim(),
        });
    }
    let mut psi = psi0.amps.clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - now;
        if span != 0.0 {
            let steps = (span.abs() / step).ceil().max(1.0);
            let dt = span / steps;
            for _ in 0..steps as usize {
                rk4_step(h, &mut psi, dt);
            }
            now = target;
        }
        out.push(QuantumState { amps: psi.clone() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{build_hamiltonian, CouplingMode};
    use crate::topology::{builtin_network, BuiltinKind, IndexMap, NodeId};

    fn two_level(j: f64) -> HamiltonianMatrix {
        let idx = IndexMap::from_nodes(&[NodeId(0), NodeId(1)]).unwrap();
        HamiltonianMatrix::from_dense(vec![0.0, j, j, 0.0], idx).unwrap()
    }

    #[test]
    fn localized_and_superposition() {
        let s = localized_state(8, 0).unwrap();
        assert_eq!(s.fidelities()[0], 1.0);
        assert_eq!(s.norm_sqr(), 1.0);
        let s = localized_state(2, 1).unwrap();
        assert_eq!(s.fidelities(), vec![0.0, 1.0]);
        assert!(localized_state(3, 3).is_err());

        let u = superposition_state(8).unwrap();
        for f in u.fidelities() {
            assert!((f - 0.125).abs() < 1e-15);
        }
        assert_eq!(superposition_state(1).unwrap().fidelities(), vec![1.0]);
        assert_eq!(superposition_state(0), Err(DynamicsError::ZeroDimension));
        for n in 1..40 {
            assert!((superposition_state(n).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_level_spectrum() {
        let sp = eigendecompose(&two_level(1.0)).unwrap();
        assert!((sp.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((sp.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = sp.eigenvector(0);
        assert!((v0[0] - r).abs() < 1e-15 && (v0[1] + r).abs() < 1e-15);
        let v1 = sp.eigenvector(1);
        assert!((v1[0] - r).abs() < 1e-15 && (v1[1] - r).abs() < 1e-15);
    }

    #[test]
    fn zero_matrix_spectrum() {
        let sp = symmetric_eigen(3, &[0.0; 9]).unwrap();
        assert_eq!(sp.eigenvalues(), &[0.0, 0.0, 0.0]);
        assert_eq!(sp.orthonormality_error(), 0.0);
    }

    #[test]
    fn ring_spectrum_is_analytic() {
        let net = builtin_network(BuiltinKind::MaxLengths);
        let h = build_hamiltonian(&net, CouplingMode::constant()).unwrap();
        let sp = eigendecompose(&h).unwrap();
        let mut expected: Vec<f64> = (0..8)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 8.0).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in sp.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert!(sp.reconstruction_error(h.entries()) < 1e-12);
        assert!(sp.orthonormality_error() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_input() {
        assert!(matches!(
            symmetric_eigen(2, &[0.0, 1.0, 2.0, 0.0]),
            Err(DynamicsError::Hamiltonian(HamiltonianError::NotSymmetric(
                0, 1
            )))
        ));
    }

    #[test]
    fn evolve_at_zero_is_identity() {
        let net = builtin_network(BuiltinKind::MidLengths);
        let h = build_hamiltonian(&net, CouplingMode::dipole()).unwrap();
        let sp = eigendecompose(&h).unwrap();
        let psi0 = localized_state(8, 0).unwrap();
        let psi = evolve(&sp, &psi0, 0.0).unwrap();
        assert!(psi.max_abs_diff(&psi0) <= 1e-12);
    }

    #[test]
    fn two_level_transfer() {
        let j = 0.7;
        let sp = eigendecompose(&two_level(j)).unwrap();
        let psi0 = localized_state(2, 0).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.1;
            let f = evolve(&sp, &psi0, t).unwrap().fidelities();
            assert!((f[1] - (j * t).sin().powi(2)).abs() < 1e-12);
        }
        let t = std::f64::consts::PI / (2.0 * j);
        assert!((evolve(&sp, &psi0, t).unwrap().fidelities()[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_state_on_constant_ring_is_static() {
        let net = builtin_network(BuiltinKind::MaxLengths);
        let h = build_hamiltonian(&net, CouplingMode::constant()).unwrap();
        let sp = eigendecompose(&h).unwrap();
        let psi0 = superposition_state(8).unwrap();
        for t in [0.3, 1.0, 7.5] {
            let psi = evolve(&sp, &psi0, t).unwrap();
            let phase = Complex64::from_polar(1.0, -2.0 * t);
            for (a, b) in psi.amplitudes().iter().zip(psi0.amplitudes()) {
                assert!((a - b * phase).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let sp = eigendecompose(&two_level(1.0)).unwrap();
        let psi = localized_state(3, 0).unwrap();
        assert!(matches!(
            evolve(&sp, &psi, 1.0),
            Err(DynamicsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rk4_examples() {
        let h = two_level(1.0);
        let psi0 = localized_state(2, 0).unwrap();
        assert_eq!(rk4_evolve(&h, &psi0, 0.0, 0.01).unwrap(), psi0);
        let psi = rk4_evolve(&h, &psi0, 1.3, 1e-3).unwrap();
        assert!((psi.fidelities()[1] - 1.3f64.sin().powi(2)).abs() < 1e-8);
        assert_eq!(
            rk4_evolve(&h, &psi0, 1.0, 0.0),
            Err(DynamicsError::BadStep(0.0))
        );
        assert!(rk4_evolve(&h, &psi0, 1.0, -1.0).is_err());
    }

    #[test]
    fn trace_grid_and_window() {
        let net = builtin_network(BuiltinKind::MaxLengths);
        let h = build_hamiltonian(&net, CouplingMode::dipole()).unwrap();
        let psi0 = localized_state(8, 0).unwrap();
        let tr = fidelity_trace(&h, &psi0, 101).unwrap();
        assert_eq!(tr.samples(), 101);
        assert_eq!(tr.times()[0], 0.0);
        let t_max = 1.0 / j_min(&h).unwrap();
        assert_eq!(tr.t_max(), t_max);
        assert_eq!(*tr.times().last().unwrap(), t_max);
        assert!(tr.max_norm_error() < 1e-12);
        assert!(fidelity_trace(&h, &psi0, 1).is_err());
    }

    #[test]
    fn nearest_sample_snaps() {
        let tr = FidelityTrace::new(
            vec![0.0, 1.0, 2.0],
            vec![vec![1.0], vec![1.0], vec![1.0]],
            InitialCondition::Custom,
        )
        .unwrap();
        assert_eq!(tr.nearest_sample(-3.0), 0);
        assert_eq!(tr.nearest_sample(0.4), 0);
        assert_eq!(tr.nearest_sample(0.5), 0);
        assert_eq!(tr.nearest_sample(0.6), 1);
        assert_eq!(tr.nearest_sample(9.0), 2);
    }

    #[test]
    fn sequential_and_parallel_traces_are_identical() {
        let net = builtin_network(BuiltinKind::MidLengths);
        let h = build_hamiltonian(&net, CouplingMode::dipole()).unwrap();
        let psi0 = superposition_state(8).unwrap();
        let a = fidelity_trace_with(&h, &psi0, 501, Exec::Sequential).unwrap();
        let b = fidelity_trace_with(&h, &psi0, 501, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
