//! Distance of the scar and of mid-spectrum states from thermality as the
//! chain grows. Random instances plus the fixed XXZ chain at every length.

use scar_thermo::ensemble::{scaling_sweep, InstanceConfig, ModelSpec, SweepConfig};

fn main() -> scar_thermo::Result<()> {
    let config = SweepConfig {
        n_range: (8..=11).collect(),
        seeds_per_n: 40,
        base_seed: 0,
        workers: std::thread::available_parallelism().map_or(1, |w| w.get()),
        instance: InstanceConfig::default(),
        fixed_model: ModelSpec::XXZ_DEFAULT,
        band: [0.45, 0.55],
    };
    println!("{:>3} {:<9} {:>5} {:>14} {:>14}", "N", "family", "count", "median |db|", "median min_d1");
    for summary in scaling_sweep(&config)? {
        for r in summary.rows() {
            println!(
                "{:>3} {:<9} {:>5} {:>14.5} {:>14.5}",
                r.n_sites, r.family, r.count, r.median_abs_delta_beta, r.median_min_d1
            );
        }
    }
    Ok(())
}
