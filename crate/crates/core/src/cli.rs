//! Command-line front end: `single`, `ensemble`, `sweep`, `selftest`.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical error, 4 I/O error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{Overrides, RunConfig};
use crate::ensemble::{aggregate_stats, band_indices, run_ensemble, run_instance, scaling_sweep, spectral_data};
use crate::error::{Error, Result};
use crate::hilbert::{build_k0_sector, PureState};
use crate::linalg;
use crate::model::{embed_projected_hamiltonian, project_to_sector, sample_gue_term};
use crate::output::{self, Manifest, ManifestTerm};
use crate::spectral::{
    canonical_beta, diagonalize, locate_qmbs, r_statistic_with_min, select_thermal_reference, ChaosReport, ScarLocation,
};
use crate::thermometry::{reduced_canonical_dm, subsystem_temperature, thermometry_for_state, BetaSearch};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "scar-thermo", version, about = "Thermometry of the product-state scar in projector-embedded spin chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One instance: spectrum, β_C(E) curve, thermometry of scar and thermal reference.
    Single,
    /// Seeded ensemble at one chain length with per-family statistics.
    Ensemble,
    /// Ensemble plus the fixed XXZ model over a range of chain lengths.
    Sweep,
    /// Fast internal consistency checks.
    Selftest,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Base seed; instance i uses base + i.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Chain length.
    #[arg(long, global = true, value_name = "N")]
    pub sites: Option<usize>,
    /// Instances (per chain length for `sweep`).
    #[arg(long, global = true, value_name = "K")]
    pub instances: Option<usize>,
    /// Worker threads.
    #[arg(long, global = true, value_name = "W", env = "SCAR_THERMO_WORKERS")]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            sites: self.sites,
            instances: self.instances,
            workers: self.workers,
            out: self.out.clone(),
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::InvalidInput(_) => EXIT_CONFIG,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    if let Command::Selftest = cli.command {
        return Ok(selftest());
    }
    let config = RunConfig::load(cli.common.config.as_deref(), &cli.common.overrides())?;
    match cli.command {
        Command::Single => cmd_single(&config)?,
        Command::Ensemble => cmd_ensemble(&config)?,
        Command::Sweep => cmd_sweep(&config)?,
        Command::Selftest => unreachable!(),
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct SingleReport {
    n_sites: usize,
    seed: u64,
    sector_dim: usize,
    e_min: f64,
    e_max: f64,
    chaos: Option<ChaosReport>,
    scar_location: Option<ScarLocation>,
    states: Vec<SingleState>,
}

#[derive(Debug, Serialize)]
struct SingleState {
    family: &'static str,
    e_c: f64,
    e_s: f64,
    result: crate::thermometry::ThermometryResult,
}

pub fn cmd_single(config: &RunConfig) -> Result<()> {
    let dir = output::prepare_dir(&config.output_dir)?;
    let n = config.n_sites;
    let term = config.model.local_term(config.base_seed);
    let spec = spectral_data(&term, n)?;
    let bands = config.filters.bands_for(n);
    let chaos = match r_statistic_with_min(spec.eigenvalues(), config.filters.r_window, bands.min_levels) {
        Ok(c) => Some(c),
        Err(Error::InsufficientData(_)) => None,
        Err(e) => return Err(e),
    };
    let scar = match locate_qmbs(&spec) {
        Ok(l) => Some(l),
        Err(Error::DegenerateScar { .. }) => None,
        Err(e) => return Err(e),
    };
    let search = config.beta_search.resolve(spec.width())?;
    let mut targets = Vec::new();
    if let Some(l) = scar {
        targets.push(("scar", l.index));
    }
    targets.push(("thermal", select_thermal_reference(&spec)?));
    if let Some(band) = config.excited_band {
        let skip = scar.map_or(usize::MAX, |l| l.index);
        targets.extend(band_indices(&spec, band, skip).into_iter().map(|a| ("band", a)));
    }
    let states = targets
        .into_iter()
        .map(|(family, alpha)| {
            let result = thermometry_for_state(&spec, alpha, &search, config.emit_objective_samples)?;
            let (e_c, e_s) = crate::ensemble::fraction_of_spectrum(&spec, &result)?;
            Ok(SingleState { family, e_c, e_s, result })
        })
        .collect::<Result<Vec<_>>>()?;

    output::write_spectrum(&dir.join("spectrum.csv"), &spec)?;
    output::write_beta_curve(&dir.join("beta_curve.csv"), &spec)?;
    output::write_csv(
        &dir.join("thermometry.csv"),
        &output::STATE_HEADER,
        states.iter().map(|s| output::state_row(0, s.family, &s.result)),
    )?;
    if config.emit_objective_samples {
        let rows = states.iter().flat_map(|s| {
            s.result.objective_samples.iter().flatten().map(move |&(b, d)| {
                vec![
                    "0".to_string(),
                    s.result.eigenstate_index.to_string(),
                    s.family.to_string(),
                    output::fmt_f64(b),
                    output::fmt_f64(d),
                ]
            })
        });
        output::write_csv(
            &dir.join("objective_samples.csv"),
            &["instance_id", "state_index", "family", "beta", "distance"],
            rows,
        )?;
    }
    let report = SingleReport {
        n_sites: n,
        seed: config.base_seed,
        sector_dim: spec.dim(),
        e_min: spec.e_min(),
        e_max: spec.e_max(),
        chaos,
        scar_location: scar,
        states,
    };
    output::write_json(&dir.join("thermometry.json"), &report)?;
    let terms = vec![ManifestTerm { instance_id: Some(0), seed: Some(config.base_seed), term }];
    output::write_json(&dir.join("manifest.json"), &Manifest::new("single", config, vec![n], terms)?)?;

    println!("N = {n}, sector dimension {}, E in [{:.6}, {:.6}]", spec.dim(), spec.e_min(), spec.e_max());
    if let Some(c) = chaos {
        println!("<r> = {:.4} over {} gaps", c.mean_r, c.n_gaps);
    }
    for s in &report.states {
        let r = &s.result;
        println!(
            "{:<8} index {:>5}  E = {:+.6}  beta_C = {}  beta_S = {:+.6}  min_d1 = {:.6}  S = {:.6}",
            s.family,
            r.eigenstate_index,
            r.energy,
            r.beta_canonical.map_or("edge".to_string(), |b| format!("{b:+.6}")),
            r.beta_subsystem,
            r.min_distance,
            r.entropy_half_chain
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

pub fn cmd_ensemble(config: &RunConfig) -> Result<()> {
    let dir = output::prepare_dir(&config.output_dir)?;
    let records = run_ensemble(
        config.n_sites,
        config.base_seed,
        config.n_instances,
        config.resolved_workers(),
        &config.instance_config(),
    )?;
    let stats = match aggregate_stats(&records) {
        Ok(s) => Ok(s),
        Err(Error::InsufficientData(m)) => Err(m),
        Err(e) => return Err(e),
    };
    output::write_ensemble_outputs(&dir, config, &records, stats.as_ref().map_err(|m| m.clone()))?;

    let accepted = records.iter().filter(|r| r.accepted).count();
    println!("N = {}, {} instances, {accepted} accepted", config.n_sites, records.len());
    match &stats {
        Ok(s) => {
            for (name, f) in [("scar", &s.scar), ("thermal", &s.thermal)] {
                println!(
                    "{name:<8} <db> = {:+.5} +- {:.5}  var = {:.5}  mean min_d1 = {:.4}  pearson = {}  tail = {}",
                    f.mean_delta_beta,
                    f.stderr_mean_delta_beta,
                    f.variance_delta_beta,
                    f.mean_min_distance,
                    f.pearson.map_or("n/a".to_string(), |p| format!("{p:.4}")),
                    f.tail_fit.map_or("n/a".to_string(), |t| format!("{:?}", t.best).to_lowercase()),
                );
            }
        }
        Err(m) => println!("no statistics: {m}"),
    }
    println!("wrote {}", dir.display());
    Ok(())
}

pub fn cmd_sweep(config: &RunConfig) -> Result<()> {
    let dir = output::prepare_dir(&config.output_dir)?;
    let summaries = scaling_sweep(&config.sweep_config())?;
    output::write_sweep(&dir.join("sweep.csv"), &summaries)?;
    output::write_json(&dir.join("sweep.json"), &summaries)?;
    let terms = vec![ManifestTerm { instance_id: None, seed: None, term: config.sweep_model.local_term(0) }];
    output::write_json(&dir.join("manifest.json"), &Manifest::new("sweep", config, config.n_range.clone(), terms)?)?;
    for s in &summaries {
        for r in s.rows() {
            println!(
                "N = {:>2} {:<9} count {:>4}  median |db| = {:.5}  median min_d1 = {:.5}",
                r.n_sites, r.family, r.count, r.median_abs_delta_beta, r.median_min_d1
            );
        }
    }
    println!("wrote {}", dir.display());
    Ok(())
}

type Check = (&'static str, fn() -> Result<String>);

/// Runs the built-in checks, printing one PASS/FAIL line each.
pub fn selftest() -> i32 {
    let checks: [Check; 5] = [
        ("scar is an exact zero mode", check_scar),
        ("two-level canonical beta", check_two_level),
        ("sector spectrum within full spectrum", check_sector),
        ("planted temperature recovered", check_planted),
        ("instance pipeline is deterministic", check_determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    if failed == 0 {
        EXIT_OK
    } else {
        EXIT_NUMERICAL
    }
}

fn ensure(ok: bool, detail: String) -> Result<String> {
    if ok {
        Ok(detail)
    } else {
        Err(Error::Numerical(detail))
    }
}

fn check_scar() -> Result<String> {
    let h = embed_projected_hamiltonian(&sample_gue_term(1), 8)?;
    let zero = PureState::all_zero(8)?;
    let hv = h.full_matrix().apply(zero.amplitudes())?;
    let norm = hv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    ensure(norm < 1e-12, format!("|H|0...0>| = {norm:.1e}"))
}

fn check_two_level() -> Result<String> {
    let beta = canonical_beta(&[0.0, 1.0], 0.25)?;
    let err = (beta - 3f64.ln()).abs();
    ensure(err < 1e-9, format!("error {err:.1e}"))
}

fn check_sector() -> Result<String> {
    let n = 6;
    let h = embed_projected_hamiltonian(&sample_gue_term(2), n)?;
    let full = linalg::hermitian_eigenvalues(h.full_matrix().to_dense().as_ref())?;
    let sector = build_k0_sector(n)?;
    let block = linalg::hermitian_eigenvalues(project_to_sector(&h, &sector)?.as_ref())?;
    let worst = block
        .iter()
        .map(|e| full.iter().map(|f| (e - f).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    ensure(worst < 1e-10, format!("{} levels, worst mismatch {worst:.1e}", block.len()))
}

fn check_planted() -> Result<String> {
    let n = 8;
    let h = embed_projected_hamiltonian(&sample_gue_term(3), n)?;
    let sector = build_k0_sector(n)?;
    let spec = diagonalize(&project_to_sector(&h, &sector)?, &sector)?;
    let planted = 1.3 / spec.width();
    let rho = reduced_canonical_dm(&spec, planted)?;
    let search = BetaSearch::new(-40.0 / spec.width(), 40.0 / spec.width(), 256, 1e-10)?;
    let fit = subsystem_temperature(&spec, &rho, &search)?;
    let err = (fit.beta - planted).abs();
    ensure(err < 1e-6 && fit.min_distance < 1e-8, format!("error {err:.1e}, distance {:.1e}", fit.min_distance))
}

fn check_determinism() -> Result<String> {
    let config = crate::ensemble::InstanceConfig::default();
    let a = run_instance(0, 42, 8, &config)?;
    let b = run_instance(0, 42, 8, &config)?;
    ensure(a == b, "two runs of seed 42 agree".to_string())
}
