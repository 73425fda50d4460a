//! Canonical inverse temperature `β_C(E)` from `Tr(H e^{−βH}) / Z = E`.

use scar_thermo::ensemble::{spectral_data, ModelSpec};
use scar_thermo::spectral::{canonical_beta, gibbs_energy};

fn main() -> scar_thermo::Result<()> {
    // Two levels {0, 1}: E = 1/(1 + e^β) gives β_C(1/4) = ln 3.
    let b = canonical_beta(&[0.0, 1.0], 0.25)?;
    println!("two-level: beta_C(0.25) = {b:.15}, ln 3 = {:.15}", 3f64.ln());

    let spec = spectral_data(&ModelSpec::XXZ_DEFAULT.local_term(0), 10)?;
    let eigs = spec.eigenvalues();
    println!("\nXXZ chain, N = 10, E in [{:.4}, {:.4}]", spec.e_min(), spec.e_max());
    println!("{:>10} {:>12} {:>12}", "E", "beta_C", "E(beta_C)");
    for k in 1..10 {
        let e = spec.e_min() + spec.width() * k as f64 / 10.0;
        let beta = canonical_beta(eigs, e)?;
        println!("{e:>10.4} {beta:>12.6} {:>12.4}", gibbs_energy(eigs, beta));
    }

    match canonical_beta(eigs, spec.e_max()) {
        Ok(b) => println!("edge energy gave {b}"),
        Err(e) => println!("\nat E_max: {e}"),
    }
    Ok(())
}
