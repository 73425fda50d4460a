//! Plot-ready CSV and JSON writers.
//!
//! CSVs are RFC 4180 with a header row. Floats carry 17 significant digits
//! (`{:.16e}`) so every value round-trips; a missing value is an empty field.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::ensemble::{EnsembleStats, Histogram, InstanceRecord, StateRecord, SweepSummary};
use crate::error::Result;
use crate::model::{LocalTerm, GUE_CONVENTION, RNG_ALGORITHM};
use crate::spectral::{canonical_beta, SpectralData};
use crate::thermometry::ThermometryResult;

/// Energies sampled by [`write_beta_curve`].
pub const BETA_CURVE_POINTS: usize = 200;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?)
}

/// Writes `header` and `rows` to `path`.
pub fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Creates `dir` (and parents) if needed.
pub fn prepare_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

pub const STATE_HEADER: [&str; 9] =
    ["instance_id", "state_index", "energy", "beta_C", "beta_S", "delta_beta", "min_d1", "entropy", "flags"];

/// `family`, plus `;boundary` when the β_S search stopped at its range end.
pub fn state_flags(family: &str, result: &ThermometryResult) -> String {
    if result.boundary_hit {
        format!("{family};boundary")
    } else {
        family.to_string()
    }
}

pub fn state_row(instance_id: usize, family: &str, r: &ThermometryResult) -> Vec<String> {
    vec![
        instance_id.to_string(),
        r.eigenstate_index.to_string(),
        fmt_f64(r.energy),
        fmt_opt(r.beta_canonical),
        fmt_f64(r.beta_subsystem),
        fmt_opt(r.delta_beta),
        fmt_f64(r.min_distance),
        fmt_f64(r.entropy_half_chain),
        state_flags(family, r),
    ]
}

/// Measured states of an instance, labelled by family.
pub fn labelled_states(record: &InstanceRecord) -> Vec<(&'static str, &StateRecord)> {
    let mut out = Vec::new();
    if let Some(s) = &record.scar {
        out.push(("scar", s));
    }
    if let Some(s) = &record.thermal {
        out.push(("thermal", s));
    }
    out.extend(record.excited_band.iter().map(|s| ("band", s)));
    out
}

/// One row per measured state of every accepted instance.
pub fn write_instances(path: &Path, records: &[InstanceRecord]) -> Result<()> {
    let rows = records
        .iter()
        .flat_map(|rec| labelled_states(rec).into_iter().map(move |(f, s)| state_row(rec.instance_id, f, &s.result)));
    write_csv(path, &STATE_HEADER, rows)
}

/// One row per instance, rejected ones included.
pub fn write_instance_summary(path: &Path, records: &[InstanceRecord]) -> Result<()> {
    let header = [
        "instance_id",
        "seed",
        "n_sites",
        "sector_dim",
        "e_min",
        "e_max",
        "mean_r",
        "scar_index",
        "scar_overlap",
        "scar_rank_fraction",
        "accepted",
        "rejection",
    ];
    let rows = records.iter().map(|r| {
        vec![
            r.instance_id.to_string(),
            r.seed.to_string(),
            r.n_sites.to_string(),
            r.sector_dim.to_string(),
            fmt_f64(r.e_min),
            fmt_f64(r.e_max),
            fmt_opt(r.chaos.map(|c| c.mean_r)),
            r.scar_location.map(|l| l.index.to_string()).unwrap_or_default(),
            fmt_opt(r.scar_location.map(|l| l.overlap)),
            fmt_opt(r.scar_location.map(|l| l.rank_fraction)),
            r.accepted.to_string(),
            r.rejection.map(|x| x.as_str().to_string()).unwrap_or_default(),
        ]
    });
    write_csv(path, &header, rows)
}

/// `(β_C, β_S, e_C, e_S)` per instance of one family.
pub fn write_scatter(path: &Path, records: &[InstanceRecord], family: &str) -> Result<()> {
    let rows = records.iter().flat_map(|rec| {
        labelled_states(rec).into_iter().filter(|(f, _)| *f == family).map(move |(_, s)| {
            vec![
                rec.instance_id.to_string(),
                fmt_opt(s.result.beta_canonical),
                fmt_f64(s.result.beta_subsystem),
                fmt_f64(s.e_c),
                fmt_f64(s.e_s),
            ]
        })
    });
    write_csv(path, &["instance_id", "beta_C", "beta_S", "e_C", "e_S"], rows)
}

pub fn write_histogram(path: &Path, h: &Histogram) -> Result<()> {
    let rows = h.edges.windows(2).zip(&h.counts).map(|(e, &c)| {
        vec![fmt_f64(e[0]), fmt_f64(e[1]), fmt_f64(0.5 * (e[0] + e[1])), c.to_string()]
    });
    write_csv(path, &["bin_lo", "bin_hi", "center", "count"], rows)
}

/// `D(β)` samples kept when `emit_objective_samples` is set.
pub fn write_objective_samples(path: &Path, records: &[InstanceRecord]) -> Result<()> {
    let rows = records.iter().flat_map(|rec| {
        labelled_states(rec).into_iter().flat_map(move |(family, s)| {
            s.result.objective_samples.iter().flatten().map(move |&(beta, d)| {
                vec![
                    rec.instance_id.to_string(),
                    s.result.eigenstate_index.to_string(),
                    family.to_string(),
                    fmt_f64(beta),
                    fmt_f64(d),
                ]
            })
        })
    });
    write_csv(path, &["instance_id", "state_index", "family", "beta", "distance"], rows)
}

/// `(E_α, S_α)` for every eigenstate of the block.
pub fn write_spectrum(path: &Path, spec: &SpectralData) -> Result<()> {
    let rows = (0..spec.dim())
        .map(|a| {
            Ok(vec![
                a.to_string(),
                fmt_f64(spec.eigenvalues()[a]),
                fmt_f64(spec.rank_fraction(a)),
                fmt_f64(spec.entropy(a)?),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(path, &["index", "energy", "rank_fraction", "entropy"], rows)
}

/// `β_C(E)` at [`BETA_CURVE_POINTS`] energies at the cell midpoints of
/// `(E_min, E_max)`.
pub fn write_beta_curve(path: &Path, spec: &SpectralData) -> Result<()> {
    let (lo, w) = (spec.e_min(), spec.width());
    let rows = (0..BETA_CURVE_POINTS)
        .map(|k| {
            let e = lo + w * (k as f64 + 0.5) / BETA_CURVE_POINTS as f64;
            Ok(vec![fmt_f64(e), fmt_f64(canonical_beta(spec.eigenvalues(), e)?)])
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(path, &["energy", "beta_C"], rows)
}

pub fn write_sweep(path: &Path, summaries: &[SweepSummary]) -> Result<()> {
    let header = [
        "n_sites",
        "family",
        "count",
        "mean_abs_delta_beta",
        "median_abs_delta_beta",
        "mean_min_d1",
        "median_min_d1",
        "variance_delta_beta",
        "pearson",
    ];
    let rows = summaries.iter().flat_map(|s| s.rows()).map(|r| {
        vec![
            r.n_sites.to_string(),
            r.family.to_string(),
            r.count.to_string(),
            fmt_f64(r.mean_abs_delta_beta),
            fmt_f64(r.median_abs_delta_beta),
            fmt_f64(r.mean_min_d1),
            fmt_f64(r.median_min_d1),
            fmt_f64(r.variance_delta_beta),
            fmt_opt(r.pearson),
        ]
    });
    write_csv(path, &header, rows)
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub code_version: String,
    pub config_hash: String,
    pub rng: String,
    pub gue_convention: String,
    pub base_seed: u64,
    pub n_sites: Vec<usize>,
    pub r_band: [f64; 2],
    pub r_band_small: [f64; 2],
    pub scar_position_band: [f64; 2],
    pub beta_range_scale: f64,
    pub grid_points: usize,
    /// The configuration with `workers` and `output_dir` cleared.
    pub config: RunConfig,
    pub local_terms: Vec<ManifestTerm>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestTerm {
    pub instance_id: Option<usize>,
    pub seed: Option<u64>,
    pub term: LocalTerm,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig, n_sites: Vec<usize>, local_terms: Vec<ManifestTerm>) -> Result<Self> {
        let mut canonical = config.clone();
        canonical.workers = 0;
        canonical.output_dir = PathBuf::new();
        Ok(Self {
            command: command.to_string(),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash()?,
            rng: RNG_ALGORITHM.to_string(),
            gue_convention: GUE_CONVENTION.to_string(),
            base_seed: config.base_seed,
            n_sites,
            r_band: config.filters.r_band,
            r_band_small: config.filters.r_band_small,
            scar_position_band: config.filters.scar_position_band,
            beta_range_scale: config.beta_search.range_scale,
            grid_points: config.beta_search.grid_points,
            config: canonical,
            local_terms,
        })
    }
}

/// Writes every artifact of an ensemble run into `dir`.
pub fn write_ensemble_outputs(
    dir: &Path,
    config: &RunConfig,
    records: &[InstanceRecord],
    stats: std::result::Result<&EnsembleStats, String>,
) -> Result<()> {
    write_instances(&dir.join("instances.csv"), records)?;
    write_instance_summary(&dir.join("instance_summary.csv"), records)?;
    match stats {
        Ok(stats) => {
            write_json(&dir.join("stats.json"), stats)?;
            for (name, fam) in [("scar", &stats.scar), ("thermal", &stats.thermal)] {
                write_histogram(&dir.join(format!("hist_delta_beta_{name}.csv")), &fam.delta_beta_histogram)?;
                write_histogram(&dir.join(format!("hist_min_d1_{name}.csv")), &fam.min_distance_histogram)?;
            }
        }
        Err(message) => {
            let accepted = records.iter().filter(|r| r.accepted).count();
            let value = serde_json::json!({
                "n_instances": records.len(),
                "n_accepted": accepted,
                "error": message,
            });
            write_json(&dir.join("stats.json"), &value)?;
        }
    }
    for family in ["scar", "thermal"] {
        write_scatter(&dir.join(format!("scatter_{family}.csv")), records, family)?;
    }
    if config.emit_objective_samples {
        write_objective_samples(&dir.join("objective_samples.csv"), records)?;
    }
    let terms = records
        .iter()
        .map(|r| ManifestTerm { instance_id: Some(r.instance_id), seed: Some(r.seed), term: r.local_term.clone() })
        .collect();
    write_json(&dir.join("manifest.json"), &Manifest::new("ensemble", config, vec![config.n_sites], terms)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = fmt_f64(0.1);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(fmt_f64(-1.0 / 3.0).parse::<f64>().unwrap(), -1.0 / 3.0);
    }

    #[test]
    fn csv_quotes_and_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(&path, &["a", "b"], [vec!["x,y".to_string(), "z".to_string()]]).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\r\n\"x,y\",z\r\n");
    }
}
