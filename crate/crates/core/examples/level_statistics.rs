//! Mean adjacent-gap ratio `⟨r⟩` for random-matrix, Poisson and spin-chain
//! spectra. Reference values: GUE ≈ 0.5996, GOE ≈ 0.5307, Poisson ≈ 0.3863.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use scar_thermo::ensemble::{spectral_data, ModelSpec};
use scar_thermo::linalg::hermitian_eigenvalues;
use scar_thermo::spectral::r_statistic;
use scar_thermo::C64;

fn gue_eigenvalues(dim: usize, rng: &mut ChaCha8Rng) -> scar_thermo::Result<Vec<f64>> {
    let mut g = |_: usize, _: usize| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
    let a = faer::Mat::from_fn(dim, dim, &mut g);
    let h = faer::Mat::from_fn(dim, dim, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    hermitian_eigenvalues(h.as_ref())
}

fn main() -> scar_thermo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut total = 0.0;
    for _ in 0..10 {
        total += r_statistic(&gue_eigenvalues(300, &mut rng)?, 0.5)?.mean_r;
    }
    println!("GUE dim 300, 10 draws:     <r> = {:.4}", total / 10.0);

    let mut level = 0.0;
    let poisson: Vec<f64> = (0..100_000)
        .map(|_| {
            let gap: f64 = Exp1.sample(&mut rng);
            level += gap;
            level
        })
        .collect();
    println!("Poisson, 1e5 levels:       <r> = {:.4}", r_statistic(&poisson, 1.0)?.mean_r);

    for seed in 0..5 {
        let spec = spectral_data(&ModelSpec::Gue.local_term(seed), 12)?;
        let c = r_statistic(spec.eigenvalues(), 0.5)?;
        println!("spin chain N = 12 seed {seed}:  <r> = {:.4} ({} gaps)", c.mean_r, c.n_gaps);
    }
    let spec = spectral_data(&ModelSpec::XXZ_DEFAULT.local_term(0), 12)?;
    println!("XXZ N = 12:                <r> = {:.4}", r_statistic(spec.eigenvalues(), 0.5)?.mean_r);
    Ok(())
}
