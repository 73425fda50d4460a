//! Subsystem temperatures: the β whose reduced Gibbs state on two
//! neighbouring sites is closest, in trace norm, to an eigenstate's reduced
//! state.
//!
//! `σ_S(β)` is the partial trace of the full Gibbs state, which equals the
//! Gibbs-weighted sum of the per-eigenstate reduced states. That sum is what
//! we evaluate; it costs `O(dim)` per β instead of a matrix exponential.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{trace_distance, DensityMatrix};
use crate::spectral::{canonical_beta, gibbs_weights, SpectralData};

/// Search settings in units of the inverse spectral width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetaSearchConfig {
    /// The search covers `[−range_scale/W, range_scale/W]`.
    pub range_scale: f64,
    pub grid_points: usize,
    /// Golden-section stops once the bracket is below `tolerance · (β_hi − β_lo)`.
    pub tolerance: f64,
}

impl Default for BetaSearchConfig {
    fn default() -> Self {
        Self { range_scale: 40.0, grid_points: 256, tolerance: 1e-8 }
    }
}

impl BetaSearchConfig {
    /// Concrete interval for a spectrum of width `width`.
    pub fn resolve(&self, width: f64) -> Result<BetaSearch> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(invalid(format!("spectral width must be positive, got {width}")));
        }
        let half = self.range_scale / width;
        BetaSearch::new(-half, half, self.grid_points, self.tolerance)
    }
}

/// A validated search interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSearch {
    pub lo: f64,
    pub hi: f64,
    pub grid_points: usize,
    pub tolerance: f64,
}

impl BetaSearch {
    pub fn new(lo: f64, hi: f64, grid_points: usize, tolerance: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(invalid(format!("β search range [{lo}, {hi}] is not a finite interval")));
        }
        if grid_points < 64 {
            return Err(invalid(format!("β grid needs at least 64 points, got {grid_points}")));
        }
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(invalid(format!("β tolerance must lie in (0, 1), got {tolerance}")));
        }
        Ok(Self { lo, hi, grid_points, tolerance })
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / (self.grid_points - 1) as f64;
        (0..self.grid_points).map(move |k| if k + 1 == self.grid_points { self.hi } else { self.lo + step * k as f64 })
    }
}

/// `Tr_{S̄} σ(β)` on sites {0, 1}.
pub fn reduced_canonical_dm(spec: &SpectralData, beta: f64) -> Result<DensityMatrix> {
    if !beta.is_finite() {
        return Err(invalid(format!("β must be finite, got {beta}")));
    }
    let weights = gibbs_weights(spec.eigenvalues(), beta);
    let mut sigma = DensityMatrix::zeros(4);
    for (w, rho) in weights.iter().zip(spec.two_site_rdms()) {
        if *w > 0.0 {
            sigma.add_scaled(*w, rho);
        }
    }
    Ok(sigma)
}

/// `d₁(ρ_S, σ_S(β))`.
pub fn distance_objective(spec: &SpectralData, rho_s: &DensityMatrix, beta: f64) -> Result<f64> {
    if rho_s.dim() != 4 {
        return Err(invalid(format!("expected a two-site (4x4) state, got dimension {}", rho_s.dim())));
    }
    trace_distance(rho_s, &reduced_canonical_dm(spec, beta)?)
}

/// Outcome of one subsystem-temperature search.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemFit {
    pub beta: f64,
    pub min_distance: f64,
    /// The minimizer sits at an end of the search interval.
    pub boundary_hit: bool,
    /// The coarse scan, `(β, d₁)` per grid point.
    pub samples: Vec<(f64, f64)>,
}

/// Minimizes `d₁(ρ_S, σ_S(β))`: a uniform scan locates the best grid point,
/// then golden-section search refines inside its two neighbouring cells.
pub fn subsystem_temperature(spec: &SpectralData, rho_s: &DensityMatrix, search: &BetaSearch) -> Result<SubsystemFit> {
    let objective = |beta: f64| -> Result<f64> {
        let d = distance_objective(spec, rho_s, beta)?;
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Numerical(format!("objective is not finite at β = {beta}")))
        }
    };
    let samples = search.grid().map(|b| objective(b).map(|d| (b, d))).collect::<Result<Vec<_>>>()?;
    let (k_best, &(grid_beta, grid_d)) = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("grid has at least 64 points");
    let left = samples[k_best.saturating_sub(1)].0;
    let right = samples[(k_best + 1).min(samples.len() - 1)].0;
    let abs_tol = search.tolerance * (search.hi - search.lo);

    let (mut beta, mut d) = golden_section_min(objective, left, right, abs_tol)?;
    if let Some((b, v)) = kink_polish(objective, beta, 2.0 * abs_tol)? {
        if v < d {
            beta = b;
            d = v;
        }
    }
    if grid_d < d {
        beta = grid_beta;
        d = grid_d;
    }
    let boundary_hit = beta - search.lo <= abs_tol || search.hi - beta <= abs_tol;
    Ok(SubsystemFit { beta, min_distance: d, boundary_hit, samples })
}

/// At an exact fit the objective is `|β − β*|`-shaped, and golden-section
/// leaves an error of order the bracket width. Intersecting the secants
/// through `x ± h, x ± 2h` lands on the kink; `None` unless the two sides
/// slope down and up.
fn kink_polish<F>(f: F, x: f64, h: f64) -> Result<Option<(f64, f64)>>
where
    F: Fn(f64) -> Result<f64>,
{
    let (l2, l1, r1, r2) = (f(x - 2.0 * h)?, f(x - h)?, f(x + h)?, f(x + 2.0 * h)?);
    let (sl, sr) = ((l1 - l2) / h, (r2 - r1) / h);
    if !(sl < 0.0 && sr > 0.0) {
        return Ok(None);
    }
    let t = (r1 - l1 + sl * (x - h) - sr * (x + h)) / (sl - sr);
    if !(t > x - 2.0 * h && t < x + 2.0 * h) {
        return Ok(None);
    }
    Ok(Some((t, f(t)?)))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`; stops when the
/// bracket is narrower than `tol`. Returns the best point evaluated.
pub fn golden_section_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let (mut best_x, mut best_f) = if fc <= fd { (c, fc) } else { (d, fd) };
    for end in [a, b] {
        let fe = f(end)?;
        if fe < best_f {
            best_x = end;
            best_f = fe;
        }
    }
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if fc < best_f {
                best_x = c;
                best_f = fc;
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if fd < best_f {
                best_x = d;
                best_f = fd;
            }
        }
    }
    Ok((best_x, best_f))
}

/// Canonical and subsystem temperatures of one eigenstate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermometryResult {
    pub eigenstate_index: usize,
    pub energy: f64,
    /// `None` when the energy is a spectral edge, where β diverges.
    pub beta_canonical: Option<f64>,
    pub beta_subsystem: f64,
    pub delta_beta: Option<f64>,
    pub min_distance: f64,
    pub entropy_half_chain: f64,
    pub boundary_hit: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub objective_samples: Option<Vec<(f64, f64)>>,
}

/// Bundles `β_C(E_α)`, `β_S` of `ρ_S(α)`, their difference, the residual
/// distance, and the half-chain entropy.
pub fn thermometry_for_state(
    spec: &SpectralData,
    eigenstate_index: usize,
    search: &BetaSearch,
    keep_samples: bool,
) -> Result<ThermometryResult> {
    if eigenstate_index >= spec.dim() {
        return Err(invalid(format!("eigenstate {eigenstate_index} out of range (dim {})", spec.dim())));
    }
    let energy = spec.eigenvalues()[eigenstate_index];
    let beta_canonical = match canonical_beta(spec.eigenvalues(), energy) {
        Ok(b) => Some(b),
        Err(Error::OutOfRange { .. }) => None,
        Err(e) => return Err(e),
    };
    let fit = subsystem_temperature(spec, &spec.two_site_rdms()[eigenstate_index], search)?;
    Ok(ThermometryResult {
        eigenstate_index,
        energy,
        beta_canonical,
        beta_subsystem: fit.beta,
        delta_beta: beta_canonical.map(|bc| fit.beta - bc),
        min_distance: fit.min_distance,
        entropy_half_chain: spec.entropy(eigenstate_index)?,
        boundary_hit: fit.boundary_hit,
        objective_samples: keep_samples.then_some(fit.samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::build_k0_sector;
    use crate::model::{embed_projected_hamiltonian, project_to_sector, sample_gue_term};
    use crate::spectral::diagonalize;

    fn instance(n: usize, seed: u64) -> SpectralData {
        let sector = build_k0_sector(n).unwrap();
        let h = embed_projected_hamiltonian(&sample_gue_term(seed), n).unwrap();
        diagonalize(&project_to_sector(&h, &sector).unwrap(), &sector).unwrap()
    }

    #[test]
    fn kink_polish_lands_on_a_v() {
        let f = |x: f64| Ok(2.5 * (x - 0.3).abs());
        let (t, v) = kink_polish(f, 0.3 + 3e-9, 1e-8).unwrap().unwrap();
        assert!((t - 0.3).abs() < 1e-15 && v < 1e-14);
        let smooth = |x: f64| Ok((x - 0.3).powi(2));
        assert!(kink_polish(smooth, 0.9, 1e-3).unwrap().is_none());
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| Ok((x - 0.3).powi(2)), -2.0, 5.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx < 1e-18);
        let (x, _) = golden_section_min(|x| Ok((x - 1.0).abs()), 4.0, -3.0, 1e-10).unwrap();
        assert!((x - 1.0).abs() < 1e-9);
    }

    #[test]
    fn search_validation() {
        assert!(BetaSearch::new(1.0, -1.0, 256, 1e-8).is_err());
        assert!(BetaSearch::new(-1.0, 1.0, 63, 1e-8).is_err());
        assert!(BetaSearch::new(-1.0, f64::INFINITY, 256, 1e-8).is_err());
        assert!(BetaSearchConfig::default().resolve(0.0).is_err());
        let s = BetaSearchConfig::default().resolve(4.0).unwrap();
        assert_eq!((s.lo, s.hi), (-10.0, 10.0));
        let grid: Vec<f64> = s.grid().collect();
        assert_eq!(grid.len(), 256);
        assert_eq!(grid[0], -10.0);
        assert_eq!(grid[255], 10.0);
    }

    #[test]
    fn reduced_gibbs_state_is_a_density_matrix() {
        let spec = instance(7, 2);
        for beta in [-3.0, -0.2, 0.0, 0.5, 4.0] {
            reduced_canonical_dm(&spec, beta).unwrap().check_invariants(1e-12).unwrap();
        }
        assert!(reduced_canonical_dm(&spec, f64::NAN).is_err());
    }

    #[test]
    fn large_beta_gives_ground_state() {
        let spec = instance(7, 3);
        let sigma = reduced_canonical_dm(&spec, 1e3 / spec.width()).unwrap();
        assert!(sigma.max_abs_diff(&spec.two_site_rdms()[0]) < 1e-6);
    }

    #[test]
    fn planted_solution_is_recovered() {
        let spec = instance(8, 5);
        let search = BetaSearchConfig::default().resolve(spec.width()).unwrap();
        let target = 0.37 * search.hi;
        let rho = reduced_canonical_dm(&spec, target).unwrap();
        assert!(distance_objective(&spec, &rho, target).unwrap() < 1e-14);
        let fit = subsystem_temperature(&spec, &rho, &search).unwrap();
        assert!((fit.beta - target).abs() < 1e-6);
        assert!(fit.min_distance < 1e-8);
        assert!(!fit.boundary_hit);
        assert!(fit.samples.iter().all(|&(_, d)| fit.min_distance <= d));
    }

    #[test]
    fn objective_is_continuous() {
        let spec = instance(7, 8);
        let rho = &spec.two_site_rdms()[spec.dim() / 2];
        for k in -5..=5 {
            let beta = k as f64 * 0.3 / spec.width();
            let d0 = distance_objective(&spec, rho, beta).unwrap();
            let d1 = distance_objective(&spec, rho, beta + 1e-6).unwrap();
            assert!((d0 - d1).abs() < 1e-4);
        }
    }

    #[test]
    fn edge_states_have_no_canonical_beta() {
        let spec = instance(6, 1);
        let search = BetaSearchConfig::default().resolve(spec.width()).unwrap();
        let ground = thermometry_for_state(&spec, 0, &search, false).unwrap();
        assert!(ground.beta_canonical.is_none() && ground.delta_beta.is_none());
        let mid = thermometry_for_state(&spec, spec.dim() / 2, &search, true).unwrap();
        assert_eq!(mid.delta_beta, Some(mid.beta_subsystem - mid.beta_canonical.unwrap()));
        assert_eq!(mid.objective_samples.as_ref().unwrap().len(), 256);
        assert!(thermometry_for_state(&spec, spec.dim(), &search, false).is_err());
    }
}
