//! Two-site local terms and the projector-embedded chain Hamiltonian
//! `H = Σ_n P_{n,n+1} h_{n,n+1} P_{n,n+1}` with periodic boundaries and
//! `P = 1 − |00⟩⟨00|`, which annihilates `|0…0⟩` for every `h`.
//!
//! A two-site operator acting on the bond `(n, n+1)` is indexed as
//! `s_n + 2·s_{n+1}`, following the crate-wide least-significant-site rule.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hilbert::{SectorBasis, SpinBasis, MAX_SECTOR_SITES};
use crate::C64;

/// Identifier of the generator behind every seeded draw.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng::seed_from_u64 (rand_chacha 0.9)";

/// Human-readable statement of the random local-term normalization.
pub const GUE_CONVENTION: &str =
    "h = (A + A^dagger)/2, A_ij = (x + i y)/sqrt(2), x,y ~ N(0,1); off-diagonal real/imag variance 1/4, diagonal variance 1/2";

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Where a local term came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Gue { seed: u64 },
    Xxz { b: f64, #[serde(rename = "J")] j: f64, #[serde(rename = "Delta")] delta: f64 },
    Custom,
}

/// A 4×4 Hermitian two-site operator `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTerm {
    entries: [C64; 16],
    provenance: Provenance,
}

#[derive(Serialize, Deserialize)]
struct LocalTermRecord {
    entries: Vec<[f64; 2]>,
    provenance: Provenance,
}

impl Serialize for LocalTerm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LocalTermRecord { entries: self.entries.iter().map(|z| [z.re, z.im]).collect(), provenance: self.provenance }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalTerm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = LocalTermRecord::deserialize(d)?;
        if rec.entries.len() != 16 {
            return Err(serde::de::Error::custom(format!("local term needs 16 entries, got {}", rec.entries.len())));
        }
        let mut entries = [ZERO; 16];
        for (slot, [re, im]) in entries.iter_mut().zip(rec.entries) {
            *slot = C64::new(re, im);
        }
        Ok(LocalTerm { entries, provenance: rec.provenance })
    }
}

impl LocalTerm {
    /// Wraps row-major entries; rejects matrices that are not Hermitian to 1e-14.
    pub fn from_entries(entries: [C64; 16], provenance: Provenance) -> Result<Self> {
        let term = Self { entries, provenance };
        let defect = term.hermitian_defect();
        if defect > 1e-14 {
            return Err(invalid(format!("local term is not Hermitian (defect {defect:e})")));
        }
        Ok(term)
    }

    pub fn entries(&self) -> &[C64; 16] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * 4 + col]
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `P h P` with the `|00⟩` row and column removed.
    pub fn projected(&self) -> [C64; 16] {
        let mut out = self.entries;
        for k in 0..4 {
            out[k] = ZERO;
            out[k * 4] = ZERO;
        }
        out
    }
}

/// Draws a random two-site term from the Gaussian unitary ensemble.
pub fn sample_gue_term(seed: u64) -> LocalTerm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = [ZERO; 16];
    for z in a.iter_mut() {
        let x: f64 = StandardNormal.sample(&mut rng);
        let y: f64 = StandardNormal.sample(&mut rng);
        *z = C64::new(x, y) / std::f64::consts::SQRT_2;
    }
    let mut h = [ZERO; 16];
    for i in 0..4 {
        for j in 0..4 {
            h[i * 4 + j] = (a[i * 4 + j] + a[j * 4 + i].conj()) * 0.5;
        }
    }
    LocalTerm { entries: h, provenance: Provenance::Gue { seed } }
}

type Op2 = [[C64; 2]; 2];

fn spin_ops() -> (Op2, Op2, Op2, Op2) {
    let r = |x: f64| C64::new(x, 0.0);
    let id = [[r(1.0), ZERO], [ZERO, r(1.0)]];
    let sx = [[ZERO, r(0.5)], [r(0.5), ZERO]];
    let sy = [[ZERO, C64::new(0.0, -0.5)], [C64::new(0.0, 0.5), ZERO]];
    let sz = [[r(0.5), ZERO], [ZERO, r(-0.5)]];
    (id, sx, sy, sz)
}

/// `first ⊗ second` where `first` acts on the lower site of the bond.
fn two_site(first: &Op2, second: &Op2) -> [C64; 16] {
    let mut out = [ZERO; 16];
    for row in 0..4 {
        for col in 0..4 {
            out[row * 4 + col] = first[row & 1][col & 1] * second[row >> 1][col >> 1];
        }
    }
    out
}

/// `h = b(sˣ⊗1 + 1⊗sˣ) + J(sˣ⊗sˣ + sʸ⊗sʸ) + Δ sᶻ⊗sᶻ` with spin-1/2
/// operators `s = σ/2`.
pub fn xxz_term(b: f64, j: f64, delta: f64) -> LocalTerm {
    let (id, sx, sy, sz) = spin_ops();
    let parts = [
        (b, two_site(&sx, &id)),
        (b, two_site(&id, &sx)),
        (j, two_site(&sx, &sx)),
        (j, two_site(&sy, &sy)),
        (delta, two_site(&sz, &sz)),
    ];
    let mut entries = [ZERO; 16];
    for (coef, m) in parts {
        for (e, v) in entries.iter_mut().zip(m) {
            *e += v * coef;
        }
    }
    LocalTerm { entries, provenance: Provenance::Xxz { b, j, delta } }
}

/// Column-compressed sparse complex matrix.
#[derive(Debug, Clone)]
pub struct SparseMatrix {
    dim: usize,
    col_ptr: Vec<usize>,
    rows: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries `(row, value)` of column `col`.
    pub fn column(&self, col: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let range = self.col_ptr[col]..self.col_ptr[col + 1];
        self.rows[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    pub fn apply(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.dim {
            return Err(invalid(format!("vector length {} does not match dimension {}", x.len(), self.dim)));
        }
        let mut y = vec![ZERO; self.dim];
        for (col, &xc) in x.iter().enumerate() {
            if xc == ZERO {
                continue;
            }
            for (row, v) in self.column(col) {
                y[row] += v * xc;
            }
        }
        Ok(y)
    }

    pub fn to_dense(&self) -> Mat<C64> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for col in 0..self.dim {
            for (row, v) in self.column(col) {
                m[(row, col)] += v;
            }
        }
        m
    }

    /// Largest `|H_ij − conj(H_ji)|` over stored entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for col in 0..self.dim {
            for (row, v) in self.column(col) {
                let mirror = self.column(row).find(|&(r, _)| r == col).map_or(ZERO, |(_, w)| w);
                worst = worst.max((v - mirror.conj()).norm());
            }
        }
        worst
    }
}

/// The translation-invariant Hamiltonian built from one local term.
#[derive(Debug, Clone)]
pub struct ProjectedHamiltonian {
    n_sites: usize,
    local_term: LocalTerm,
    full: SparseMatrix,
}

/// Assembles `Σ_n P h P` on every bond of a periodic chain, including `(N−1, 0)`.
pub fn embed_projected_hamiltonian(term: &LocalTerm, n_sites: usize) -> Result<ProjectedHamiltonian> {
    if n_sites < 3 {
        return Err(invalid(format!("projected chain needs at least 3 sites, got {n_sites}")));
    }
    if n_sites > MAX_SECTOR_SITES {
        return Err(invalid(format!("projected chain supports at most {MAX_SECTOR_SITES} sites, got {n_sites}")));
    }
    let dim = SpinBasis::new(n_sites)?.dim();
    let php = term.projected();
    let mut col_ptr = Vec::with_capacity(dim + 1);
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut scratch: Vec<(usize, C64)> = Vec::with_capacity(4 * n_sites);
    col_ptr.push(0);
    for col in 0..dim {
        scratch.clear();
        for first in 0..n_sites {
            let second = (first + 1) % n_sites;
            let local_in = ((col >> first) & 1) | (((col >> second) & 1) << 1);
            let cleared = col & !((1 << first) | (1 << second));
            for local_out in 0..4 {
                let v = php[local_out * 4 + local_in];
                if v != ZERO {
                    let row = cleared | ((local_out & 1) << first) | ((local_out >> 1) << second);
                    scratch.push((row, v));
                }
            }
        }
        scratch.sort_by_key(|&(r, _)| r);
        let mut k = 0;
        while k < scratch.len() {
            let row = scratch[k].0;
            let mut acc = ZERO;
            while k < scratch.len() && scratch[k].0 == row {
                acc += scratch[k].1;
                k += 1;
            }
            if acc != ZERO {
                rows.push(row);
                values.push(acc);
            }
        }
        col_ptr.push(rows.len());
    }
    Ok(ProjectedHamiltonian {
        n_sites,
        local_term: term.clone(),
        full: SparseMatrix { dim, col_ptr, rows, values },
    })
}

impl ProjectedHamiltonian {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn local_term(&self) -> &LocalTerm {
        &self.local_term
    }

    pub fn full_matrix(&self) -> &SparseMatrix {
        &self.full
    }
}

/// `V† H V` restricted to the zero-momentum block, as a dense matrix.
pub fn project_to_sector(h: &ProjectedHamiltonian, sector: &SectorBasis) -> Result<Mat<C64>> {
    if sector.n_sites() != h.n_sites {
        return Err(invalid(format!(
            "sector built for {} sites, Hamiltonian has {}",
            sector.n_sites(),
            h.n_sites
        )));
    }
    let dim = sector.dim();
    let inv_sqrt_period: Vec<f64> = sector.periods().iter().map(|&p| 1.0 / f64::from(p).sqrt()).collect();
    let mut out = Mat::<C64>::zeros(dim, dim);
    for b in 0..dim {
        for (col, weight) in sector.column(b) {
            for (row, v) in h.full.column(col) {
                let a = sector.orbit_index(row);
                out[(a, b)] += v * (weight * inv_sqrt_period[a]);
            }
        }
    }
    Ok(out)
}
