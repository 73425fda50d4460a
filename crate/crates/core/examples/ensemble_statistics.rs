//! Seeded ensemble: filter instances, compare `δβ = β_S − β_C` and the
//! distance to the nearest thermal state for the scar and its neighbour.
//!
//!     cargo run --release --example ensemble_statistics -- 10 300

use scar_thermo::ensemble::{aggregate_stats, run_ensemble, FamilyStats, InstanceConfig};

fn bar(count: usize, max: usize) -> String {
    "#".repeat((40 * count).div_ceil(max.max(1)))
}

fn show(name: &str, f: &FamilyStats) {
    println!(
        "\n{name}: {} states, <db> = {:+.4} +- {:.4}, var = {:.5}, mean min_d1 = {:.4}, pearson = {:.3}",
        f.count,
        f.mean_delta_beta,
        f.stderr_mean_delta_beta,
        f.variance_delta_beta,
        f.mean_min_distance,
        f.pearson.unwrap_or(f64::NAN)
    );
    match &f.tail_fit {
        Some(t) => println!(
            "  tail: gaussian residual {:.4}, exponential residual {:.4} -> {:?}",
            t.gaussian.residual, t.exponential.residual, t.best
        ),
        None => println!("  tail: {}", f.tail_fit_error.as_deref().unwrap_or("-")),
    }
    let h = &f.delta_beta_histogram;
    let max = h.counts.iter().copied().max().unwrap_or(0);
    for (c, &count) in h.centers().zip(&h.counts) {
        println!("  {c:+.4} {count:>4} {}", bar(count, max));
    }
}

fn main() -> scar_thermo::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(10, |s| s.parse().expect("chain length"));
    let k: usize = args.next().map_or(200, |s| s.parse().expect("instance count"));
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get());

    let records = run_ensemble(n, 0, k, workers, &InstanceConfig::default())?;
    let stats = aggregate_stats(&records)?;
    println!("N = {n}: {} instances, {} accepted, rejected {:?}", stats.n_instances, stats.n_accepted, stats.rejections);
    println!("mean <r> of accepted instances {:.4}", stats.mean_r_accepted);
    show("scar", &stats.scar);
    show("thermal", &stats.thermal);
    Ok(())
}
