//! Exact diagonalization of the zero-momentum block, level statistics, and
//! the canonical temperature of an energy.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{entanglement_entropy, partial_trace, DensityMatrix, PureState, SectorBasis};
use crate::linalg;
use crate::C64;

/// Eigenvalues with `|E| <= ZERO_ENERGY_TOL` count as the scar's zero.
pub const ZERO_ENERGY_TOL: f64 = 1e-8;

/// Minimum level count inside the r-statistic window.
pub const DEFAULT_MIN_LEVELS: usize = 50;

/// Minimum overlap of the located scar with `|0…0⟩`.
pub const SCAR_OVERLAP_MIN: f64 = 0.999;

/// Subsystem used for reduced states: two neighbouring sites.
pub const SUBSYSTEM_SITES: [usize; 2] = [0, 1];

/// Full eigendecomposition of one instance in its zero-momentum block.
#[derive(Debug, Clone)]
pub struct SpectralData {
    sector: SectorBasis,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<C64>,
    two_site_rdms: Vec<DensityMatrix>,
}

/// Diagonalizes a Hermitian sector matrix and precomputes, for every
/// eigenstate, the reduced state on sites {0, 1}.
pub fn diagonalize(sector_matrix: &Mat<C64>, sector: &SectorBasis) -> Result<SpectralData> {
    let dim = sector.dim();
    if sector_matrix.nrows() != dim || sector_matrix.ncols() != dim {
        return Err(invalid(format!(
            "matrix is {}x{}, sector dimension is {dim}",
            sector_matrix.nrows(),
            sector_matrix.ncols()
        )));
    }
    let defect = linalg::hermitian_defect(sector_matrix.as_ref());
    if defect > 1e-10 {
        return Err(invalid(format!("sector matrix is not Hermitian (defect {defect:e})")));
    }
    let (eigenvalues, eigenvectors) = linalg::hermitian_eigh(sector_matrix.as_ref())?;
    let mut two_site_rdms = Vec::with_capacity(dim);
    let mut column = vec![C64::new(0.0, 0.0); dim];
    for alpha in 0..dim {
        for (k, slot) in column.iter_mut().enumerate() {
            *slot = eigenvectors[(k, alpha)];
        }
        let full = sector.lift_to_full(&column)?;
        two_site_rdms.push(partial_trace(&full, &SUBSYSTEM_SITES)?);
    }
    Ok(SpectralData { sector: sector.clone(), eigenvalues, eigenvectors, two_site_rdms })
}

impl SpectralData {
    pub fn n_sites(&self) -> usize {
        self.sector.n_sites()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn sector(&self) -> &SectorBasis {
        &self.sector
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Mat<C64> {
        &self.eigenvectors
    }

    pub fn two_site_rdms(&self) -> &[DensityMatrix] {
        &self.two_site_rdms
    }

    /// Half-chain entanglement entropy (nats) of eigenstate `alpha`.
    pub fn entropy(&self, alpha: usize) -> Result<f64> {
        entanglement_entropy(&self.lifted_state(alpha)?)
    }

    pub fn e_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn e_max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn width(&self) -> f64 {
        self.e_max() - self.e_min()
    }

    /// Sector amplitudes of eigenstate `alpha`.
    pub fn eigenvector(&self, alpha: usize) -> Vec<C64> {
        (0..self.dim()).map(|k| self.eigenvectors[(k, alpha)]).collect()
    }

    /// Eigenstate `alpha` embedded in the full basis.
    pub fn lifted_state(&self, alpha: usize) -> Result<PureState> {
        self.sector.lift_to_full(&self.eigenvector(alpha))
    }

    /// Position `alpha / (dim − 1)` of a level within the sorted spectrum.
    pub fn rank_fraction(&self, alpha: usize) -> f64 {
        if self.dim() < 2 {
            return 0.0;
        }
        alpha as f64 / (self.dim() - 1) as f64
    }
}

/// Normalized Gibbs weights `e^{−βE_α}/Z`, shifted by the spectral edge
/// that keeps every exponent non-positive.
pub fn gibbs_weights(eigenvalues: &[f64], beta: f64) -> Vec<f64> {
    let reference = if beta >= 0.0 {
        eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    };
    let mut w: Vec<f64> = eigenvalues.iter().map(|e| (-beta * (e - reference)).exp()).collect();
    let z: f64 = w.iter().sum();
    for x in &mut w {
        *x /= z;
    }
    w
}

/// Canonical energy `Tr[σ(β) H]` over the given spectrum.
pub fn gibbs_energy(eigenvalues: &[f64], beta: f64) -> f64 {
    gibbs_weights(eigenvalues, beta).iter().zip(eigenvalues).map(|(w, e)| w * e).sum()
}

/// Solves `Tr[σ(β) H] = E` for the canonical inverse temperature.
///
/// The Gibbs energy is strictly decreasing in β, so the root is bracketed by
/// doubling `[−1/W, 1/W]` and then refined with an Illinois false-position
/// step that falls back to bisection whenever the bracket stalls.
pub fn canonical_beta(eigenvalues: &[f64], target_energy: f64) -> Result<f64> {
    if eigenvalues.len() < 2 {
        return Err(Error::InsufficientData("canonical temperature needs at least two levels".into()));
    }
    if !target_energy.is_finite() {
        return Err(invalid("target energy is not finite"));
    }
    let e_min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let e_max = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(target_energy > e_min && target_energy < e_max) {
        return Err(Error::OutOfRange { energy: target_energy, min: e_min, max: e_max });
    }
    let width = e_max - e_min;
    let f = |beta: f64| gibbs_energy(eigenvalues, beta) - target_energy;

    let f0 = f(0.0);
    if f0 == 0.0 {
        return Ok(0.0);
    }
    // f decreases: f0 > 0 means the root sits at positive β
    let direction = if f0 > 0.0 { 1.0 } else { -1.0 };
    let (mut a, mut fa) = (0.0, f0);
    let mut b = direction / width;
    let mut fb = f(b);
    let mut doublings = 0;
    while fb.signum() == fa.signum() && fb != 0.0 {
        a = b;
        fa = fb;
        b *= 2.0;
        fb = f(b);
        doublings += 1;
        if doublings > 1100 || !fb.is_finite() {
            return Err(Error::Numerical(format!("could not bracket β for E = {target_energy}")));
        }
    }
    if fb == 0.0 {
        return Ok(b);
    }

    let mut last_width = (b - a).abs();
    let mut stalled = 0;
    for _ in 0..500 {
        let mid = 0.5 * (a + b);
        let tol = (1e-10 * mid.abs()).max(1e-12);
        if (b - a).abs() <= tol {
            return Ok(mid);
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if stalled >= 2 || !(c > lo && c < hi) {
            c = mid;
            stalled = 0;
        }
        let fc = f(c);
        if fc == 0.0 {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            // keep a; halve its residual so the secant pulls toward it
            fa *= 0.5;
        } else {
            a = b;
            fa = fb;
        }
        b = c;
        fb = fc;
        let width_now = (b - a).abs();
        if width_now > 0.5 * last_width {
            stalled += 1;
        } else {
            stalled = 0;
            last_width = width_now;
        }
    }
    Err(Error::Numerical(format!("β root solver did not converge for E = {target_energy}")))
}

/// Mean consecutive-gap ratio over the central part of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosReport {
    pub mean_r: f64,
    /// Number of gap ratios averaged.
    pub n_gaps: usize,
    /// Gaps dropped as degenerate.
    pub n_degenerate: usize,
    pub window: f64,
}

/// `⟨r⟩` with the default level-count floor.
pub fn r_statistic(eigenvalues: &[f64], window: f64) -> Result<ChaosReport> {
    r_statistic_with_min(eigenvalues, window, DEFAULT_MIN_LEVELS)
}

/// `⟨min(s_α, s_{α+1}) / max(s_α, s_{α+1})⟩` over the central `window`
/// fraction of the sorted levels. Gaps below `1e-12 · width` are dropped.
pub fn r_statistic_with_min(eigenvalues: &[f64], window: f64, min_levels: usize) -> Result<ChaosReport> {
    if !(window > 0.0 && window <= 1.0) {
        return Err(invalid(format!("window must lie in (0, 1], got {window}")));
    }
    if eigenvalues.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("eigenvalues must be sorted ascending"));
    }
    let n = eigenvalues.len();
    let keep = ((window * n as f64).round() as usize).min(n);
    let start = (n - keep) / 2;
    let levels = &eigenvalues[start..start + keep];
    if levels.len() < min_levels.max(3) {
        return Err(Error::InsufficientData(format!(
            "{} levels in the central window, need {}",
            levels.len(),
            min_levels.max(3)
        )));
    }
    let width = eigenvalues[n - 1] - eigenvalues[0];
    let threshold = 1e-12 * width;
    let gaps: Vec<f64> = levels.windows(2).map(|w| w[1] - w[0]).collect();
    let n_degenerate = gaps.iter().filter(|&&s| s < threshold).count();
    let mut sum = 0.0;
    let mut count = 0usize;
    for pair in gaps.windows(2) {
        let (s1, s2) = (pair[0], pair[1]);
        if s1 < threshold || s2 < threshold {
            continue;
        }
        sum += s1.min(s2) / s1.max(s2);
        count += 1;
    }
    if count == 0 {
        return Err(Error::InsufficientData("no non-degenerate gap pairs".into()));
    }
    Ok(ChaosReport { mean_r: sum / count as f64, n_gaps: count, n_degenerate, window })
}

/// Where the product-state scar sits in a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScarLocation {
    pub index: usize,
    pub overlap: f64,
    pub energy: f64,
    pub rank_fraction: f64,
}

/// Finds the eigenstate with the largest overlap with `|0…0⟩`.
pub fn locate_qmbs(spec: &SpectralData) -> Result<ScarLocation> {
    // sector index 0 is the singleton orbit of |0…0⟩
    let (index, overlap) = (0..spec.dim())
        .map(|alpha| (alpha, spec.eigenvectors[(0, alpha)].norm()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::InsufficientData("empty spectrum".into()))?;
    if overlap < SCAR_OVERLAP_MIN {
        return Err(Error::DegenerateScar { overlap });
    }
    let energy = spec.eigenvalues[index];
    if energy.abs() > ZERO_ENERGY_TOL {
        return Err(Error::Numerical(format!("scar eigenvalue {energy:e} is not zero")));
    }
    Ok(ScarLocation { index, overlap, energy, rank_fraction: spec.rank_fraction(index) })
}

/// Index of the smallest eigenvalue above the zero-energy threshold.
pub fn smallest_positive_level(eigenvalues: &[f64]) -> Result<usize> {
    eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > ZERO_ENERGY_TOL)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| Error::InsufficientData("no eigenvalue above zero".into()))
}

/// The thermal reference: the eigenstate with the smallest positive energy.
pub fn select_thermal_reference(spec: &SpectralData) -> Result<usize> {
    smallest_positive_level(&spec.eigenvalues)
}
