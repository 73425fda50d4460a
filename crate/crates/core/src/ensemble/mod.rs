//! Seeded random-model instances: generation, chaos and scar-position
//! filtering, and thermometry of the scar and its thermal neighbour.

mod stats;
mod sweep;

pub use stats::{
    aggregate_stats, fit_tail, freedman_diaconis, pearson_corr, summarize_band_averages, summarize_family, EnsembleStats, FamilyStats,
    FamilySummary, Histogram, ModelFit, TailFit, TailModel, TAIL_WINDOW_SIGMAS,
};
pub use sweep::{scaling_sweep, SweepConfig, SweepRow, SweepSummary};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::build_k0_sector;
use crate::model::{embed_projected_hamiltonian, project_to_sector, sample_gue_term, xxz_term, LocalTerm};
use crate::spectral::{
    diagonalize, gibbs_energy, locate_qmbs, r_statistic_with_min, select_thermal_reference, ChaosReport, ScarLocation,
    SpectralData,
};
use crate::thermometry::{thermometry_for_state, BetaSearch, BetaSearchConfig, ThermometryResult};

/// Which local term an instance uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSpec {
    Gue,
    Xxz {
        b: f64,
        #[serde(rename = "J")]
        j: f64,
        #[serde(rename = "Delta")]
        delta: f64,
    },
}

impl ModelSpec {
    /// The uniform-field XXZ chain used as the fixed reference model.
    pub const XXZ_DEFAULT: ModelSpec = ModelSpec::Xxz { b: 0.5, j: 1.0, delta: 0.9 };

    pub fn local_term(&self, seed: u64) -> LocalTerm {
        match *self {
            ModelSpec::Gue => sample_gue_term(seed),
            ModelSpec::Xxz { b, j, delta } => xxz_term(b, j, delta),
        }
    }
}

/// Acceptance thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Central fraction of the sector spectrum used for `⟨r⟩`.
    pub r_window: f64,
    /// Accepted `⟨r⟩` range for chains of at least `small_below` sites.
    pub r_band: [f64; 2],
    /// Accepted `⟨r⟩` range for shorter chains.
    pub r_band_small: [f64; 2],
    pub small_below: usize,
    pub min_levels: usize,
    pub min_levels_small: usize,
    /// Accepted rank fraction of the scar.
    pub scar_position_band: [f64; 2],
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            r_window: 0.5,
            r_band: [0.58, 0.6196],
            r_band_small: [0.5596, 0.6396],
            small_below: 10,
            min_levels: 50,
            min_levels_small: 12,
            scar_position_band: [0.25, 0.75],
        }
    }
}

impl FilterConfig {
    pub fn bands_for(&self, n_sites: usize) -> AcceptanceBands {
        let small = n_sites < self.small_below;
        AcceptanceBands {
            r_band: if small { self.r_band_small } else { self.r_band },
            min_levels: if small { self.min_levels_small } else { self.min_levels },
            scar_position: self.scar_position_band,
        }
    }
}

/// Thresholds resolved for one chain length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceBands {
    pub r_band: [f64; 2],
    pub min_levels: usize,
    pub scar_position: [f64; 2],
}

/// Everything `run_instance` needs besides the seed and chain length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub model: ModelSpec,
    pub beta_search: BetaSearchConfig,
    pub filters: FilterConfig,
    /// Rank-fraction band of the "highly excited" states; `None` skips them.
    pub excited_band: Option<[f64; 2]>,
    pub emit_objective_samples: bool,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::Gue,
            beta_search: BetaSearchConfig::default(),
            filters: FilterConfig::default(),
            excited_band: None,
            emit_objective_samples: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    RStatistic,
    ScarPosition,
    DegenerateScar,
    InsufficientLevels,
}

impl Rejection {
    pub fn as_str(&self) -> &'static str {
        match self {
            Rejection::RStatistic => "r-statistic",
            Rejection::ScarPosition => "scar-position",
            Rejection::DegenerateScar => "degenerate-scar",
            Rejection::InsufficientLevels => "insufficient-levels",
        }
    }
}

/// Accepts iff `⟨r⟩` lies in the band and the scar sits in the central band.
pub fn acceptance_filter(chaos: &ChaosReport, scar_rank_fraction: f64, bands: &AcceptanceBands) -> Option<Rejection> {
    let [r_lo, r_hi] = bands.r_band;
    if !(chaos.mean_r >= r_lo && chaos.mean_r <= r_hi) {
        return Some(Rejection::RStatistic);
    }
    let [p_lo, p_hi] = bands.scar_position;
    if !(scar_rank_fraction >= p_lo && scar_rank_fraction <= p_hi) {
        return Some(Rejection::ScarPosition);
    }
    None
}

/// `(e_C, e_S)`: the energy and the Gibbs energy at `β_S`, both rescaled to
/// the unit interval spanned by the spectrum.
pub fn fraction_of_spectrum(spec: &SpectralData, result: &ThermometryResult) -> Result<(f64, f64)> {
    let width = spec.width();
    if !(width > 0.0) {
        return Err(invalid("spectrum has zero width"));
    }
    if !result.beta_subsystem.is_finite() {
        return Err(invalid("subsystem β is not finite"));
    }
    let e_c = (result.energy - spec.e_min()) / width;
    let gibbs = gibbs_energy(spec.eigenvalues(), result.beta_subsystem);
    let e_s = ((gibbs - spec.e_min()) / width).clamp(0.0, 1.0);
    Ok((e_c, e_s))
}

/// Thermometry of one eigenstate plus its fraction-of-spectrum pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub result: ThermometryResult,
    pub e_c: f64,
    pub e_s: f64,
}

/// Outcome of the full pipeline for one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance_id: usize,
    pub seed: u64,
    pub n_sites: usize,
    pub local_term: LocalTerm,
    pub sector_dim: usize,
    pub e_min: f64,
    pub e_max: f64,
    pub accepted: bool,
    pub rejection: Option<Rejection>,
    pub chaos: Option<ChaosReport>,
    pub scar_location: Option<ScarLocation>,
    pub scar: Option<StateRecord>,
    pub thermal: Option<StateRecord>,
    pub excited_band: Vec<StateRecord>,
}

/// Generates, diagonalizes, filters, and measures one instance.
pub fn run_instance(instance_id: usize, seed: u64, n_sites: usize, config: &InstanceConfig) -> Result<InstanceRecord> {
    let term = config.model.local_term(seed);
    let spec = spectral_data(&term, n_sites)?;
    let bands = config.filters.bands_for(n_sites);
    let mut record = InstanceRecord {
        instance_id,
        seed,
        n_sites,
        local_term: term,
        sector_dim: spec.dim(),
        e_min: spec.e_min(),
        e_max: spec.e_max(),
        accepted: false,
        rejection: None,
        chaos: None,
        scar_location: None,
        scar: None,
        thermal: None,
        excited_band: Vec::new(),
    };

    match r_statistic_with_min(spec.eigenvalues(), config.filters.r_window, bands.min_levels) {
        Ok(chaos) => record.chaos = Some(chaos),
        Err(Error::InsufficientData(_)) => {
            record.rejection = Some(Rejection::InsufficientLevels);
            return Ok(record);
        }
        Err(e) => return Err(e),
    }
    let location = match locate_qmbs(&spec) {
        Ok(loc) => loc,
        Err(Error::DegenerateScar { .. }) => {
            record.rejection = Some(Rejection::DegenerateScar);
            return Ok(record);
        }
        Err(e) => return Err(e),
    };
    record.scar_location = Some(location);
    let chaos = record.chaos.as_ref().expect("set above");
    if let Some(reason) = acceptance_filter(chaos, location.rank_fraction, &bands) {
        record.rejection = Some(reason);
        return Ok(record);
    }
    record.accepted = true;

    let search = config.beta_search.resolve(spec.width())?;
    let measure = |alpha: usize| state_record(&spec, alpha, &search, config.emit_objective_samples);
    record.scar = Some(measure(location.index)?);
    record.thermal = Some(measure(select_thermal_reference(&spec)?)?);
    if let Some(band) = config.excited_band {
        record.excited_band = band_indices(&spec, band, location.index).into_iter().map(measure).collect::<Result<_>>()?;
    }
    Ok(record)
}

/// Builds and diagonalizes the zero-momentum block for one local term.
pub fn spectral_data(term: &LocalTerm, n_sites: usize) -> Result<SpectralData> {
    let sector = build_k0_sector(n_sites)?;
    let h = embed_projected_hamiltonian(term, n_sites)?;
    diagonalize(&project_to_sector(&h, &sector)?, &sector)
}

pub(crate) fn state_record(spec: &SpectralData, alpha: usize, search: &BetaSearch, keep_samples: bool) -> Result<StateRecord> {
    let result = thermometry_for_state(spec, alpha, search, keep_samples)?;
    let (e_c, e_s) = fraction_of_spectrum(spec, &result)?;
    Ok(StateRecord { result, e_c, e_s })
}

/// Eigenstates whose rank fraction lies in `band`, excluding `skip`.
pub fn band_indices(spec: &SpectralData, band: [f64; 2], skip: usize) -> Vec<usize> {
    (0..spec.dim())
        .filter(|&a| a != skip)
        .filter(|&a| {
            let f = spec.rank_fraction(a);
            f >= band[0] && f <= band[1]
        })
        .collect()
}

/// Runs instances `0..n_instances` with seeds `base_seed + i` on a pool of
/// `workers` threads. The output is ordered by instance id and does not
/// depend on the worker count.
pub fn run_ensemble(
    n_sites: usize,
    base_seed: u64,
    n_instances: usize,
    workers: usize,
    config: &InstanceConfig,
) -> Result<Vec<InstanceRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Numerical(format!("could not start worker pool: {e}")))?;
    pool.install(|| {
        (0..n_instances)
            .into_par_iter()
            .map(|i| run_instance(i, base_seed.wrapping_add(i as u64), n_sites, config))
            .collect::<Result<Vec<_>>>()
    })
}
