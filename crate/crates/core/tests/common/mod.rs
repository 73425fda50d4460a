//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use scar_thermo::linalg::hermitian_eigenvalues;
use scar_thermo::C64;

pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// GUE matrix `(A + A†)/2` with standard complex Gaussian entries.
pub fn gue_matrix(dim: usize, rng: &mut ChaCha8Rng) -> Mat<C64> {
    let mut draw = |_: usize, _: usize| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    let a = Mat::from_fn(dim, dim, &mut draw);
    Mat::from_fn(dim, dim, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

pub fn gue_eigenvalues(dim: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    hermitian_eigenvalues(gue_matrix(dim, &mut rng).as_ref()).unwrap()
}

/// Cumulative sums of unit-rate exponential gaps.
pub fn poisson_levels(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 0.0;
    (0..count)
        .map(|_| {
            let gap: f64 = Exp1.sample(&mut rng);
            level += gap;
            level
        })
        .collect()
}

pub fn matmul(a: &Mat<C64>, b: &Mat<C64>) -> Mat<C64> {
    let n = a.nrows();
    Mat::from_fn(n, b.ncols(), |i, j| (0..a.ncols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

/// `e^{m}` by scaling and squaring with a 30-term Taylor series.
pub fn expm(m: &Mat<C64>) -> Mat<C64> {
    let n = m.nrows();
    let norm: f64 = (0..n).map(|i| (0..n).map(|j| m[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    let a = Mat::from_fn(n, n, |i, j| m[(i, j)] * scale);
    let mut result = Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { zero() });
    let mut term = result.clone();
    for k in 1..=30 {
        term = matmul(&term, &a);
        term = Mat::from_fn(n, n, |i, j| term[(i, j)] / k as f64);
        result = Mat::from_fn(n, n, |i, j| result[(i, j)] + term[(i, j)]);
    }
    for _ in 0..squarings {
        result = matmul(&result, &result);
    }
    result
}

/// Index after moving the spin on site `s` to site `s + 1 mod N`, bit by bit.
pub fn shift_sites(index: usize, n_sites: usize) -> usize {
    (0..n_sites).filter(|s| (index >> s) & 1 == 1).map(|s| 1 << ((s + 1) % n_sites)).sum()
}

/// Dense projector `(1/N) Σ_j T^j` onto zero momentum.
pub fn k0_projector(n_sites: usize) -> Mat<C64> {
    let dim = 1usize << n_sites;
    let mut p = Mat::from_fn(dim, dim, |_, _| zero());
    for col in 0..dim {
        let mut idx = col;
        for _ in 0..n_sites {
            p[(idx, col)] += C64::new(1.0 / n_sites as f64, 0.0);
            idx = shift_sites(idx, n_sites);
        }
    }
    p
}

/// `Tr_{rest}` of a full-space operator, keeping `sites` (first site is the
/// least significant bit of the reduced index).
pub fn dense_partial_trace(rho: &Mat<C64>, n_sites: usize, sites: &[usize]) -> Mat<C64> {
    let k = sites.len();
    let mask: usize = sites.iter().map(|s| 1 << s).sum();
    let local = |i: usize| sites.iter().enumerate().map(|(j, &s)| ((i >> s) & 1) << j).sum::<usize>();
    let mut out = Mat::from_fn(1 << k, 1 << k, |_, _| zero());
    let dim = 1usize << n_sites;
    for i in 0..dim {
        for j in 0..dim {
            if i & !mask == j & !mask {
                out[(local(i), local(j))] += rho[(i, j)];
            }
        }
    }
    out
}

/// `Tr_{S̄}[P e^{−βH} P] / Tr[P e^{−βH}]` on sites {0, 1} from dense matrices.
pub fn dense_sector_gibbs_rdm(h: &Mat<C64>, n_sites: usize, beta: f64) -> Mat<C64> {
    let dim = h.nrows();
    let p = k0_projector(n_sites);
    let g = expm(&Mat::from_fn(dim, dim, |i, j| h[(i, j)] * (-beta)));
    let pg = matmul(&matmul(&p, &g), &p);
    let z: C64 = (0..dim).map(|i| pg[(i, i)]).sum();
    let rho = Mat::from_fn(dim, dim, |i, j| pg[(i, j)] / z);
    dense_partial_trace(&rho, n_sites, &[0, 1])
}

/// Page's mean entanglement entropy (nats) of a Haar state on `m × n`, `m ≤ n`.
pub fn page_entropy(m: usize, n: usize) -> f64 {
    (n + 1..=m * n).map(|k| 1.0 / k as f64).sum::<f64>() - (m as f64 - 1.0) / (2.0 * n as f64)
}
