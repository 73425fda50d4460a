use serde::{Deserialize, Serialize};

use super::stats::{summarize_band_averages, summarize_family, FamilySummary};
use super::{band_indices, run_ensemble, spectral_data, state_record, InstanceConfig, ModelSpec, StateRecord};
use crate::error::{invalid, Error, Result};
use crate::spectral::locate_qmbs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_range: Vec<usize>,
    pub seeds_per_n: usize,
    pub base_seed: u64,
    pub workers: usize,
    /// Settings of the random-model ensemble at every size.
    pub instance: InstanceConfig,
    /// Fixed reference model measured at every size.
    pub fixed_model: ModelSpec,
    /// Rank-fraction band of the highly excited states, used for the random
    /// instances and for the fixed model.
    pub band: [f64; 2],
}

/// Per-size results of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub n_sites: usize,
    pub n_instances: usize,
    pub n_accepted: usize,
    pub random_scar: FamilySummary,
    pub random_thermal: FamilySummary,
    /// Per-instance averages over the band, summarized across instances.
    pub random_band: FamilySummary,
    /// `None` when the fixed model's zero level is degenerate at this size.
    pub fixed_scar: Option<StateRecord>,
    pub fixed_scar_rank_fraction: Option<f64>,
    pub fixed_band: FamilySummary,
}

/// One CSV row: a family at one chain length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n_sites: usize,
    pub family: &'static str,
    pub count: usize,
    pub mean_abs_delta_beta: f64,
    pub median_abs_delta_beta: f64,
    pub mean_min_d1: f64,
    pub median_min_d1: f64,
    pub variance_delta_beta: f64,
    pub pearson: Option<f64>,
}

impl SweepSummary {
    pub fn rows(&self) -> Vec<SweepRow> {
        let row = |family, s: &FamilySummary| SweepRow {
            n_sites: self.n_sites,
            family,
            count: s.count,
            mean_abs_delta_beta: s.mean_abs_delta_beta,
            median_abs_delta_beta: s.median_abs_delta_beta,
            mean_min_d1: s.mean_min_distance,
            median_min_d1: s.median_min_distance,
            variance_delta_beta: s.variance_delta_beta,
            pearson: s.pearson,
        };
        let fixed_scar = summarize_family(&self.fixed_scar.iter().collect::<Vec<_>>());
        vec![
            row("scar", &self.random_scar),
            row("thermal", &self.random_thermal),
            row("band", &self.random_band),
            row("xxz_scar", &fixed_scar),
            row("xxz_band", &self.fixed_band),
        ]
    }
}

/// Random-model ensemble plus the fixed model at every chain length.
pub fn scaling_sweep(config: &SweepConfig) -> Result<Vec<SweepSummary>> {
    if config.n_range.is_empty() {
        return Err(invalid("sweep needs at least one chain length"));
    }
    let mut out = Vec::with_capacity(config.n_range.len());
    let mut instance = config.instance.clone();
    instance.excited_band = Some(config.band);
    for &n in &config.n_range {
        let records = run_ensemble(n, config.base_seed, config.seeds_per_n, config.workers, &instance)?;
        let accepted: Vec<_> = records.iter().filter(|r| r.accepted).collect();
        let scar: Vec<&StateRecord> = accepted.iter().filter_map(|r| r.scar.as_ref()).collect();
        let thermal: Vec<&StateRecord> = accepted.iter().filter_map(|r| r.thermal.as_ref()).collect();
        let bands: Vec<&[StateRecord]> = accepted.iter().map(|r| r.excited_band.as_slice()).collect();

        let spec = spectral_data(&config.fixed_model.local_term(0), n)?;
        let search = config.instance.beta_search.resolve(spec.width())?;
        let (fixed_scar, rank, scar_index) = match locate_qmbs(&spec) {
            Ok(loc) => (Some(state_record(&spec, loc.index, &search, false)?), Some(loc.rank_fraction), Some(loc.index)),
            Err(Error::DegenerateScar { .. }) => (None, None, None),
            Err(e) => return Err(e),
        };
        let band = band_indices(&spec, config.band, scar_index.unwrap_or(usize::MAX))
            .into_iter()
            .map(|a| state_record(&spec, a, &search, false))
            .collect::<Result<Vec<_>>>()?;
        out.push(SweepSummary {
            n_sites: n,
            n_instances: records.len(),
            n_accepted: accepted.len(),
            random_scar: summarize_family(&scar),
            random_thermal: summarize_family(&thermal),
            random_band: summarize_band_averages(&bands),
            fixed_scar,
            fixed_scar_rank_fraction: rank,
            fixed_band: summarize_family(&band.iter().collect::<Vec<_>>()),
        });
    }
    Ok(out)
}
