//! Projector-embedded Hamiltonian with a random two-site term.
//!
//! `H = Σ_n P h P` annihilates `|0…0⟩` exactly, so the product state is an
//! eigenstate at E = 0 sitting inside an otherwise chaotic spectrum.

use scar_thermo::hilbert::{build_k0_sector, PureState};
use scar_thermo::model::{embed_projected_hamiltonian, project_to_sector, sample_gue_term};
use scar_thermo::spectral::{diagonalize, locate_qmbs};

fn main() -> scar_thermo::Result<()> {
    let n = 10;
    let seed = 7;
    let term = sample_gue_term(seed);
    let h = embed_projected_hamiltonian(&term, n)?;
    println!("N = {n}, seed {seed}: {} nonzeros in the 2^{n} x 2^{n} matrix", h.full_matrix().nnz());

    let zero = PureState::all_zero(n)?;
    let hv = h.full_matrix().apply(zero.amplitudes())?;
    println!("|H|0...0>| = {:.1e}", hv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt());

    let sector = build_k0_sector(n)?;
    let spec = diagonalize(&project_to_sector(&h, &sector)?, &sector)?;
    let scar = locate_qmbs(&spec)?;
    println!(
        "scar: level {} of {}, E = {:.1e}, overlap {:.12}, rank fraction {:.3}, S = {:.1e}",
        scar.index,
        spec.dim(),
        scar.energy,
        scar.overlap,
        scar.rank_fraction,
        spec.entropy(scar.index)?
    );

    // Neighbouring levels carry volume-law entanglement.
    for a in scar.index.saturating_sub(3)..(scar.index + 4).min(spec.dim()) {
        let mark = if a == scar.index { "<- scar" } else { "" };
        println!("  {a:>4} E = {:+.5}  S = {:.5} {mark}", spec.eigenvalues()[a], spec.entropy(a)?);
    }
    Ok(())
}
