//! Zero-momentum block of the translation operator.
//!
//! Prints the block dimension for a range of chain lengths and checks that a
//! lifted sector state is translation invariant.

use scar_thermo::hilbert::{build_k0_sector, translation_apply};
use scar_thermo::C64;

fn main() -> scar_thermo::Result<()> {
    println!("{:>3} {:>9} {:>7}", "N", "2^N", "dim k=0");
    for n in 4..=16 {
        let sector = build_k0_sector(n)?;
        println!("{n:>3} {:>9} {:>7}", sector.full_dim(), sector.dim());
    }

    let sector = build_k0_sector(10)?;
    let coeffs: Vec<C64> = (0..sector.dim()).map(|k| C64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
    let state = sector.lift_to_full(&coeffs)?;
    let shifted = translation_apply(10, state.amplitudes())?;
    let diff: f64 = shifted.iter().zip(state.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    println!("\n|T psi - psi| = {diff:.2e} for a random k=0 state at N = 10");

    let first: Vec<_> = sector.representatives().iter().take(8).map(|r| format!("{r:010b}")).collect();
    println!("first representatives (site 0 rightmost): {}", first.join(" "));
    Ok(())
}
