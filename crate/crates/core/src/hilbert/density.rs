use faer::Mat;

use super::PureState;
use crate::error::{invalid, Result};
use crate::linalg;
use crate::C64;

/// Eigenvalues of a reduced state below this are dropped from entropy sums.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

/// A square complex matrix representing a (reduced) density operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    data: Mat<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix without checking the density-matrix invariants.
    pub fn from_mat(data: Mat<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(invalid("density matrix must be square and non-empty"));
        }
        Ok(Self { data })
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(invalid(format!("expected {} entries, got {}", dim * dim, entries.len())));
        }
        Self::from_mat(Mat::from_fn(dim, dim, |i, j| entries[i * dim + j]))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self> {
        let n = amplitudes.len();
        Self::from_mat(Mat::from_fn(n, n, |i, j| amplitudes[i] * amplitudes[j].conj()))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let w = 1.0 / dim as f64;
        Self::from_mat(Mat::from_fn(dim, dim, |i, j| if i == j { C64::new(w, 0.0) } else { C64::new(0.0, 0.0) }))
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: Mat::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn as_mat(&self) -> &Mat<C64> {
        &self.data
    }

    /// `self += weight · other`.
    pub fn add_scaled(&mut self, weight: f64, other: &DensityMatrix) {
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                self.data[(i, j)] += other.data[(i, j)] * weight;
            }
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[(i, i)]).sum()
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(self.data.as_ref())
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::hermitian_eigenvalues(self.data.as_ref())
    }

    /// Largest entrywise difference to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                worst = worst.max((self.data[(i, j)] - other.data[(i, j)]).norm());
            }
        }
        worst
    }

    /// Hermitian within `tol`, unit trace within `tol`, eigenvalues ≥ −1e-10.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > tol {
            return Err(invalid(format!("density matrix not Hermitian (defect {defect:e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(invalid(format!("density matrix trace {tr} differs from 1")));
        }
        let lowest = self.eigenvalues()?.first().copied().unwrap_or(0.0);
        if lowest < -1e-10 {
            return Err(invalid(format!("density matrix has negative eigenvalue {lowest:e}")));
        }
        Ok(())
    }
}

/// Reduced state on `keep_sites`, tracing out every other site.
///
/// The reduced index places `keep_sites[0]` in the least significant bit.
pub fn partial_trace(state: &PureState, keep_sites: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_sites();
    let mut keep_mask = 0usize;
    for &site in keep_sites {
        if site >= n {
            return Err(invalid(format!("site {site} out of range for {n} sites")));
        }
        if keep_mask & (1 << site) != 0 {
            return Err(invalid(format!("site {site} listed twice")));
        }
        keep_mask |= 1 << site;
    }
    if keep_sites.is_empty() {
        return Err(invalid("partial trace must keep at least one site"));
    }
    let k = keep_sites.len();
    let sub_dim = 1usize << k;
    let offsets: Vec<usize> = (0..sub_dim)
        .map(|a| keep_sites.iter().enumerate().filter(|(j, _)| (a >> j) & 1 == 1).map(|(_, &s)| 1 << s).sum())
        .collect();

    let amps = state.amplitudes();
    let mut rho = vec![C64::new(0.0, 0.0); sub_dim * sub_dim];
    let mut local = vec![C64::new(0.0, 0.0); sub_dim];
    for base in (0..amps.len()).filter(|i| i & keep_mask == 0) {
        for (slot, &off) in local.iter_mut().zip(&offsets) {
            *slot = amps[base | off];
        }
        for a in 0..sub_dim {
            if local[a] == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..sub_dim {
                rho[a * sub_dim + b] += local[a] * local[b].conj();
            }
        }
    }
    DensityMatrix::from_row_major(sub_dim, &rho)
}

/// Unhalved trace norm `‖a − b‖₁ = Σ|λ_i(a − b)|`; lies in [0, 2] for states.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(invalid(format!("trace distance between {}- and {}-dimensional matrices", a.dim(), b.dim())));
    }
    let n = a.dim();
    let diff = Mat::from_fn(n, n, |i, j| a.data[(i, j)] - b.data[(i, j)]);
    Ok(linalg::hermitian_eigenvalues(diff.as_ref())?.iter().map(|x| x.abs()).sum())
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon(rho.eigenvalues()?.into_iter()))
}

/// Half-chain entanglement entropy (nats) of the block `{0, …, ⌊N/2⌋ − 1}`,
/// from the Schmidt coefficients of the reshaped amplitude matrix.
pub fn entanglement_entropy(state: &PureState) -> Result<f64> {
    let n = state.n_sites();
    let left = n / 2;
    if left == 0 {
        return Ok(0.0);
    }
    let rows = 1usize << left;
    let cols = 1usize << (n - left);
    let amps = state.amplitudes();
    let m = Mat::from_fn(rows, cols, |a, b| amps[a | (b << left)]);
    let sv = linalg::singular_values(m.as_ref())?;
    Ok(shannon(sv.into_iter().map(|s| s * s)))
}

fn shannon(probs: impl Iterator<Item = f64>) -> f64 {
    let s: f64 = probs.filter(|&p| p > ENTROPY_CUTOFF).map(|p| -p * p.ln()).sum();
    s.max(0.0)
}
