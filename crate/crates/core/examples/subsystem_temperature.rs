//! Subsystem temperature: the β whose Gibbs state, reduced to two sites,
//! is closest in trace distance to the eigenstate's reduced state.

use scar_thermo::ensemble::{spectral_data, ModelSpec};
use scar_thermo::spectral::{locate_qmbs, select_thermal_reference};
use scar_thermo::thermometry::{reduced_canonical_dm, subsystem_temperature, thermometry_for_state, BetaSearchConfig};

fn main() -> scar_thermo::Result<()> {
    let spec = spectral_data(&ModelSpec::Gue.local_term(3), 10)?;
    let search = BetaSearchConfig::default().resolve(spec.width())?;

    // A reduced Gibbs state is recovered exactly.
    let planted = 2.0 / spec.width();
    let fit = subsystem_temperature(&spec, &reduced_canonical_dm(&spec, planted)?, &search)?;
    println!("planted beta {planted:.10}, recovered {:.10}, distance {:.1e}", fit.beta, fit.min_distance);

    let scar = locate_qmbs(&spec)?.index;
    let thermal = select_thermal_reference(&spec)?;
    println!("\n{:<8} {:>6} {:>10} {:>10} {:>10} {:>8} {:>7}", "state", "index", "E", "beta_C", "beta_S", "min_d1", "S");
    for (name, alpha) in [("scar", scar), ("thermal", thermal)] {
        let r = thermometry_for_state(&spec, alpha, &search, false)?;
        println!(
            "{name:<8} {alpha:>6} {:>10.5} {:>10.5} {:>10.5} {:>8.4} {:>7.4}",
            r.energy,
            r.beta_canonical.unwrap_or(f64::NAN),
            r.beta_subsystem,
            r.min_distance,
            r.entropy_half_chain
        );
    }
    Ok(())
}
