use super::{rotate_left, PureState};
use crate::error::{invalid, Result};
use crate::C64;

/// Largest chain for which the orbit tables are built (4 MiB lookup).
pub const MAX_SECTOR_SITES: usize = 20;

/// The zero-momentum block of the one-site translation.
///
/// Column `b` of the isometry `V` is the normalized equal-weight sum over the
/// cyclic orbit of `representatives[b]`. Representatives are the smallest
/// index of their orbit, listed in ascending order, so sector index 0 is
/// always the orbit of `|0…0⟩`.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_sites: usize,
    representatives: Vec<u32>,
    periods: Vec<u32>,
    orbit_of: Vec<u32>,
}

/// Enumerates the cyclic orbits of an `n_sites` chain.
pub fn build_k0_sector(n_sites: usize) -> Result<SectorBasis> {
    if n_sites < 2 {
        return Err(invalid(format!("momentum sector needs at least 2 sites, got {n_sites}")));
    }
    if n_sites > MAX_SECTOR_SITES {
        return Err(invalid(format!(
            "momentum sector supports at most {MAX_SECTOR_SITES} sites, got {n_sites}"
        )));
    }
    let dim = 1usize << n_sites;
    let mut orbit_of = vec![u32::MAX; dim];
    let mut representatives = Vec::new();
    let mut periods = Vec::new();
    for start in 0..dim {
        if orbit_of[start] != u32::MAX {
            continue;
        }
        // ascending scan: the first unvisited member of an orbit is its minimum
        let label = representatives.len() as u32;
        let mut period = 0u32;
        let mut idx = start;
        loop {
            orbit_of[idx] = label;
            period += 1;
            idx = rotate_left(idx, n_sites);
            if idx == start {
                break;
            }
        }
        representatives.push(start as u32);
        periods.push(period);
    }
    Ok(SectorBasis { n_sites, representatives, periods, orbit_of })
}

impl SectorBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.representatives.len()
    }

    pub fn full_dim(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn representatives(&self) -> &[u32] {
        &self.representatives
    }

    pub fn periods(&self) -> &[u32] {
        &self.periods
    }

    /// Sector index of the orbit containing the full-basis `index`.
    pub fn orbit_index(&self, index: usize) -> usize {
        self.orbit_of[index] as usize
    }

    /// Non-zero entries `(full index, weight)` of isometry column `b`.
    pub fn column(&self, b: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let period = self.periods[b];
        let weight = 1.0 / f64::from(period).sqrt();
        let n = self.n_sites;
        let mut idx = self.representatives[b] as usize;
        (0..period).map(move |_| {
            let out = (idx, weight);
            idx = rotate_left(idx, n);
            out
        })
    }

    /// `V·c`: embeds sector amplitudes into the full basis.
    pub fn lift_to_full(&self, amplitudes: &[C64]) -> Result<PureState> {
        self.check_len(amplitudes.len())?;
        let mut full = vec![C64::new(0.0, 0.0); self.full_dim()];
        for (idx, slot) in full.iter_mut().enumerate() {
            let b = self.orbit_of[idx] as usize;
            *slot = amplitudes[b] / f64::from(self.periods[b]).sqrt();
        }
        PureState::new(self.n_sites, full)
    }

    /// `V†ψ`: the sector components of a full-basis state.
    pub fn restrict(&self, state: &PureState) -> Result<Vec<C64>> {
        if state.n_sites() != self.n_sites {
            return Err(invalid("state and sector belong to different chains"));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (idx, &z) in state.amplitudes().iter().enumerate() {
            let b = self.orbit_of[idx] as usize;
            out[b] += z / f64::from(self.periods[b]).sqrt();
        }
        Ok(out)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(invalid(format!(
                "sector vector has length {len}, sector dimension is {}",
                self.dim()
            )));
        }
        Ok(())
    }
}
