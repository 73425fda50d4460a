//! Run configuration: TOML file, command-line overrides, validation.
//!
//! Precedence is flags > file > defaults. Every table and key is optional.
//!
//! ```toml
//! n_sites = 12
//! n_instances = 500
//! base_seed = 7
//!
//! [model]
//! kind = "xxz"
//! b = 0.5
//! J = 1.0
//! Delta = 0.9
//!
//! [filters]
//! r_band = [0.58, 0.6196]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensemble::{FilterConfig, InstanceConfig, ModelSpec, SweepConfig};
use crate::error::{Error, Result};
use crate::hilbert::MAX_SECTOR_SITES;
use crate::thermometry::BetaSearchConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Chain length for `single` and `ensemble`.
    pub n_sites: usize,
    /// Chain lengths for `sweep`.
    pub n_range: Vec<usize>,
    pub base_seed: u64,
    pub n_instances: usize,
    /// Worker threads; 0 means one per available core.
    pub workers: usize,
    pub beta_search: BetaSearchConfig,
    pub filters: FilterConfig,
    /// Rank-fraction band of extra excited states measured per accepted instance.
    pub excited_band: Option<[f64; 2]>,
    /// Fixed reference model and its thermal band, used by `sweep`.
    pub sweep_model: ModelSpec,
    pub sweep_band: [f64; 2],
    pub emit_objective_samples: bool,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelSpec::Gue,
            n_sites: 12,
            n_range: (8..=13).collect(),
            base_seed: 0,
            n_instances: 500,
            workers: 0,
            beta_search: BetaSearchConfig::default(),
            filters: FilterConfig::default(),
            excited_band: None,
            sweep_model: ModelSpec::XXZ_DEFAULT,
            sweep_band: [0.45, 0.55],
            emit_objective_samples: false,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Values given on the command line; `None` leaves the file or default value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub sites: Option<usize>,
    pub instances: Option<usize>,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), message: message.into() }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e.span().and_then(|span| field_at(text, span.start));
            config_error(field.as_deref().unwrap_or("<file>"), e.message().trim())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_error("<serialize>", e.to_string()))
    }

    /// Defaults, then the file if given, then the overrides; validated.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self> {
        let mut config = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.base_seed = v;
        }
        if let Some(v) = o.sites {
            self.n_sites = v;
        }
        if let Some(v) = o.instances {
            self.n_instances = v;
        }
        if let Some(v) = o.workers {
            self.workers = v;
        }
        if let Some(v) = &o.out {
            self.output_dir = v.clone();
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_model("model", &self.model)?;
        check_model("sweep_model", &self.sweep_model)?;
        check_sites("n_sites", self.n_sites)?;
        if self.n_range.is_empty() {
            return Err(config_error("n_range", "needs at least one chain length"));
        }
        for &n in &self.n_range {
            check_sites("n_range", n)?;
        }
        if self.n_instances == 0 {
            return Err(config_error("n_instances", "must be at least 1"));
        }
        let bs = &self.beta_search;
        if !(bs.range_scale.is_finite() && bs.range_scale > 0.0) {
            return Err(config_error("beta_search.range_scale", "must be finite and positive"));
        }
        if bs.grid_points < 64 {
            return Err(config_error("beta_search.grid_points", format!("must be at least 64, got {}", bs.grid_points)));
        }
        if !(bs.tolerance > 0.0 && bs.tolerance < 1.0) {
            return Err(config_error("beta_search.tolerance", "must lie in (0, 1)"));
        }
        let f = &self.filters;
        if !(f.r_window > 0.0 && f.r_window <= 1.0) {
            return Err(config_error("filters.r_window", "must lie in (0, 1]"));
        }
        check_band("filters.r_band", f.r_band)?;
        check_band("filters.r_band_small", f.r_band_small)?;
        check_band("filters.scar_position_band", f.scar_position_band)?;
        if f.min_levels < 3 || f.min_levels_small < 3 {
            return Err(config_error("filters.min_levels", "must be at least 3"));
        }
        if let Some(band) = self.excited_band {
            check_band("excited_band", band)?;
        }
        check_band("sweep_band", self.sweep_band)?;
        Ok(())
    }

    pub fn instance_config(&self) -> InstanceConfig {
        InstanceConfig {
            model: self.model,
            beta_search: self.beta_search,
            filters: self.filters,
            excited_band: self.excited_band,
            emit_objective_samples: self.emit_objective_samples,
        }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            n_range: self.n_range.clone(),
            seeds_per_n: self.n_instances,
            base_seed: self.base_seed,
            workers: self.resolved_workers(),
            instance: self.instance_config(),
            fixed_model: self.sweep_model,
            band: self.sweep_band,
        }
    }

    pub fn resolved_workers(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        }
    }

    /// SHA-256 of the canonical TOML form, ignoring `workers` and
    /// `output_dir` since neither changes any result.
    pub fn hash(&self) -> Result<String> {
        let mut canonical = self.clone();
        canonical.workers = 0;
        canonical.output_dir = PathBuf::new();
        Ok(hex::encode(Sha256::digest(canonical.to_toml_string()?.as_bytes())))
    }
}

/// Dotted key of the assignment on the line containing byte `offset`.
fn field_at(text: &str, offset: usize) -> Option<String> {
    let offset = offset.min(text.len());
    let line_start = text[..offset].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next()?;
    let key = line.split_once('=')?.0.trim();
    if key.is_empty() || key.starts_with('[') {
        return None;
    }
    let table = text[..line_start]
        .lines()
        .rev()
        .map(str::trim)
        .find(|l| l.starts_with('['))
        .map(|l| l.trim_matches(|c| c == '[' || c == ']').trim().to_string());
    Some(match table {
        Some(t) => format!("{t}.{key}"),
        None => key.to_string(),
    })
}

fn check_sites(field: &str, n: usize) -> Result<()> {
    if n < 3 || n > MAX_SECTOR_SITES {
        return Err(config_error(field, format!("chain length must lie in 3..={MAX_SECTOR_SITES}, got {n}")));
    }
    Ok(())
}

fn check_band(field: &str, [lo, hi]: [f64; 2]) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(config_error(field, format!("expected finite [lo, hi] with lo <= hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn check_model(field: &str, model: &ModelSpec) -> Result<()> {
    if let ModelSpec::Xxz { b, j, delta } = *model {
        if !(b.is_finite() && j.is_finite() && delta.is_finite()) {
            return Err(config_error(field, "XXZ parameters must be finite"));
        }
    }
    Ok(())
}
