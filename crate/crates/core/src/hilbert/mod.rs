//! Spin-1/2 chain kernels.
//!
//! Basis convention shared by every module: a basis index is the bit string
//! of local states with site 0 in the least significant bit, and local state
//! `|0⟩` is bit 0. Operators and reduced states on a list of sites use the
//! same rule, with the first listed site in the least significant bit.

mod density;
mod sector;

pub use density::{entanglement_entropy, partial_trace, trace_distance, von_neumann_entropy, DensityMatrix};
pub use sector::{build_k0_sector, SectorBasis, MAX_SECTOR_SITES};

use crate::error::{invalid, Result};
use crate::C64;

/// Largest chain accepted for full-basis vectors (2^26 amplitudes).
pub const MAX_SITES: usize = 26;

/// The full `2^N` product basis of an `N`-site chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinBasis {
    n_sites: usize,
}

impl SpinBasis {
    pub fn new(n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(invalid(format!("n_sites must be in 1..={MAX_SITES}, got {n_sites}")));
        }
        Ok(Self { n_sites })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Local state (0 or 1) of `site` in basis state `index`.
    #[inline]
    pub fn local_state(index: usize, site: usize) -> usize {
        (index >> site) & 1
    }

    /// Index reached by moving every site `n` to `n + 1 (mod N)`.
    #[inline]
    pub fn translate_index(&self, index: usize) -> usize {
        rotate_left(index, self.n_sites)
    }
}

#[inline]
pub(crate) fn rotate_left(index: usize, n_sites: usize) -> usize {
    let mask = (1usize << n_sites) - 1;
    ((index << 1) | (index >> (n_sites - 1))) & mask
}

/// A normalized state in the full product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    basis: SpinBasis,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(n_sites: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let basis = SpinBasis::new(n_sites)?;
        if amplitudes.len() != basis.dim() {
            return Err(invalid(format!(
                "expected {} amplitudes for {n_sites} sites, got {}",
                basis.dim(),
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid("state has zero or non-finite norm"));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / norm).collect();
        Ok(Self { basis, amplitudes })
    }

    /// The product state with every spin in `|0⟩`.
    pub fn all_zero(n_sites: usize) -> Result<Self> {
        Self::basis_state(n_sites, 0)
    }

    pub fn basis_state(n_sites: usize, index: usize) -> Result<Self> {
        let basis = SpinBasis::new(n_sites)?;
        if index >= basis.dim() {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); basis.dim()];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites
    }

    pub fn basis(&self) -> SpinBasis {
        self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `T|ψ⟩` for the one-site cyclic translation.
    pub fn translated(&self) -> PureState {
        let mut out = vec![C64::new(0.0, 0.0); self.amplitudes.len()];
        for (i, &z) in self.amplitudes.iter().enumerate() {
            out[self.basis.translate_index(i)] = z;
        }
        PureState { basis: self.basis, amplitudes: out }
    }

    /// Euclidean distance `‖ψ − φ‖`.
    pub fn distance(&self, other: &PureState) -> Result<f64> {
        if self.basis != other.basis {
            return Err(invalid("states live on different chains"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

/// Applies the one-site translation to raw full-basis amplitudes.
pub fn translation_apply(n_sites: usize, amplitudes: &[C64]) -> Result<Vec<C64>> {
    let basis = SpinBasis::new(n_sites)?;
    if amplitudes.len() != basis.dim() {
        return Err(invalid(format!(
            "translation on {n_sites} sites needs {} amplitudes, got {}",
            basis.dim(),
            amplitudes.len()
        )));
    }
    let mut out = vec![C64::new(0.0, 0.0); amplitudes.len()];
    for (i, &z) in amplitudes.iter().enumerate() {
        out[basis.translate_index(i)] = z;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn all_zero_is_translation_invariant() {
        let psi = PureState::all_zero(5).unwrap();
        assert_eq!(psi.translated(), psi);
    }

    #[test]
    fn two_site_translation_swaps() {
        // site 0 up, site 1 down -> site 1 up, site 0 down
        let psi = PureState::basis_state(2, 0b01).unwrap();
        let out = psi.translated();
        assert_eq!(out, PureState::basis_state(2, 0b10).unwrap());
    }

    #[test]
    fn w_state_is_invariant() {
        let mut amps = vec![c(0.0); 8];
        for i in [0b001, 0b010, 0b100] {
            amps[i] = c(1.0);
        }
        let psi = PureState::new(3, amps).unwrap();
        assert!(psi.translated().distance(&psi).unwrap() < 1e-15);
    }

    #[test]
    fn translation_moves_site_n_to_n_plus_one() {
        let b = SpinBasis::new(4).unwrap();
        assert_eq!(b.translate_index(0b0001), 0b0010);
        assert_eq!(b.translate_index(0b1000), 0b0001);
        assert_eq!(b.translate_index(0b1011), 0b0111);
    }

    #[test]
    fn translation_rejects_bad_length() {
        assert!(translation_apply(3, &[c(1.0); 7]).is_err());
        assert!(PureState::new(3, vec![c(1.0); 4]).is_err());
        assert!(PureState::new(2, vec![c(0.0); 4]).is_err());
    }

    #[test]
    fn translation_preserves_norm() {
        let amps: Vec<C64> = (0..32).map(|i| C64::new(i as f64, 1.0 - i as f64 * 0.3)).collect();
        let psi = PureState::new(5, amps).unwrap();
        assert!((psi.translated().norm() - 1.0).abs() < 1e-12);
        // N translations are the identity
        let mut phi = psi.clone();
        for _ in 0..5 {
            phi = phi.translated();
        }
        assert!(phi.distance(&psi).unwrap() < 1e-15);
    }
}
