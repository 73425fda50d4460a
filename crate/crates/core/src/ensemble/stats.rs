use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{InstanceRecord, StateRecord};
use crate::error::{invalid, Error, Result};

/// Half-width, in standard deviations, of the region used for tail fits.
pub const TAIL_WINDOW_SIGMAS: f64 = 2.5;

/// Minimum number of populated bins inside the tail-fit window.
const MIN_FIT_BINS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub bin_width: f64,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1]))
    }
}

fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, 0.5)
}

/// Histogram with the Freedman–Diaconis bin width `2·IQR·n^{−1/3}`.
/// A zero IQR or zero range collapses to a single bin.
pub fn freedman_diaconis(values: &[f64]) -> Result<Histogram> {
    if values.is_empty() {
        return Err(Error::InsufficientData("histogram of an empty sample".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(invalid("histogram input contains non-finite values"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (lo, hi) = (sorted[0], sorted[sorted.len() - 1]);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let width = 2.0 * iqr / (sorted.len() as f64).cbrt();
    let n_bins = if width > 0.0 && hi > lo { (((hi - lo) / width).ceil() as usize).clamp(1, 10_000) } else { 1 };
    let bin_width = if hi > lo { (hi - lo) / n_bins as f64 } else { 0.0 };
    let edges: Vec<f64> = (0..=n_bins).map(|k| if k == n_bins { hi } else { lo + bin_width * k as f64 }).collect();
    let mut counts = vec![0usize; n_bins];
    for &v in &sorted {
        let k = if bin_width > 0.0 { (((v - lo) / bin_width) as usize).min(n_bins - 1) } else { 0 };
        counts[k] += 1;
    }
    Ok(Histogram { edges, counts, bin_width })
}

/// Sample Pearson correlation. Zero spread in either input is reported as
/// `DegenerateInput`.
pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(invalid(format!("pearson inputs differ in length ({} vs {})", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData("pearson needs at least two pairs".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::DegenerateInput("zero standard deviation".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailModel {
    Gaussian,
    Exponential,
}

/// Weighted least-squares fit `ln(count) ≈ intercept − slope·g(δβ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub intercept: f64,
    /// Gaussian: fitted variance; exponential: the rate λ in units of σ.
    pub parameter: f64,
    /// Count-weighted mean squared log residual.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub gaussian: ModelFit,
    pub exponential: ModelFit,
    pub best: TailModel,
    /// Worse residual over better residual.
    pub residual_ratio: f64,
    pub bins_used: usize,
}

fn weighted_line_fit(points: &[(f64, f64, f64)]) -> (f64, f64, f64) {
    // y ≈ a + c·x with weights w
    let sw: f64 = points.iter().map(|p| p.2).sum();
    let mx = points.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = points.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let c = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - c * mx;
    let rss: f64 = points.iter().map(|p| p.2 * (p.1 - a - c * p.0).powi(2)).sum();
    (a, c, rss / sw)
}

/// Fits the log-counts near `δβ = 0` to a Gaussian `−δβ²/(2v)` and to an
/// exponential `−λ|δβ|/σ` profile, using populated bins within
/// `TAIL_WINDOW_SIGMAS·σ` of zero, where `σ² = variance`.
pub fn fit_tail(histogram: &Histogram, variance: f64) -> Result<TailFit> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::InsufficientData(format!("tail fit needs a positive variance, got {variance}")));
    }
    let sigma = variance.sqrt();
    let bins: Vec<(f64, f64)> = histogram
        .centers()
        .zip(&histogram.counts)
        .filter(|&(x, &c)| c > 0 && x.abs() <= TAIL_WINDOW_SIGMAS * sigma)
        .map(|(x, &c)| (x, c as f64))
        .collect();
    if bins.len() < MIN_FIT_BINS {
        return Err(Error::InsufficientData(format!(
            "{} populated bins near zero, need {MIN_FIT_BINS}",
            bins.len()
        )));
    }
    let gauss_pts: Vec<_> = bins.iter().map(|&(x, c)| (x * x, c.ln(), c)).collect();
    let (ga, gc, gres) = weighted_line_fit(&gauss_pts);
    let exp_pts: Vec<_> = bins.iter().map(|&(x, c)| (x.abs() / sigma, c.ln(), c)).collect();
    let (ea, ec, eres) = weighted_line_fit(&exp_pts);
    let gaussian = ModelFit {
        intercept: ga,
        parameter: if gc < 0.0 { -1.0 / (2.0 * gc) } else { f64::INFINITY },
        residual: gres,
    };
    let exponential = ModelFit { intercept: ea, parameter: -ec, residual: eres };
    let (best, better, worse) =
        if gres <= eres { (TailModel::Gaussian, gres, eres) } else { (TailModel::Exponential, eres, gres) };
    let residual_ratio = if better > 0.0 { worse / better } else { f64::INFINITY };
    Ok(TailFit { gaussian, exponential, best, residual_ratio, bins_used: bins.len() })
}

/// Aggregates of one family (scar or thermal reference) over an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyStats {
    pub count: usize,
    pub mean_delta_beta: f64,
    /// `⟨(δβ − ⟨δβ⟩)²⟩` with the `1/n` normalization.
    pub variance_delta_beta: f64,
    pub stderr_mean_delta_beta: f64,
    pub median_abs_delta_beta: f64,
    pub mean_min_distance: f64,
    pub median_min_distance: f64,
    pub delta_beta_histogram: Histogram,
    pub min_distance_histogram: Histogram,
    pub tail_fit: Option<TailFit>,
    pub tail_fit_error: Option<String>,
    pub pearson: Option<f64>,
    pub pearson_degenerate: bool,
    pub beta_canonical: Vec<f64>,
    pub beta_subsystem: Vec<f64>,
    /// `(e_C, e_S)` per accepted instance.
    pub fraction_pairs: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n_instances: usize,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub rejections: BTreeMap<String, usize>,
    pub mean_r_accepted: f64,
    pub scar: FamilyStats,
    pub thermal: FamilyStats,
}

fn family_stats(states: &[&StateRecord]) -> Result<FamilyStats> {
    let pairs: Vec<(f64, f64, f64, f64)> = states
        .iter()
        .filter_map(|s| {
            s.result
                .beta_canonical
                .zip(s.result.delta_beta)
                .map(|(bc, db)| (bc, s.result.beta_subsystem, db, s.result.min_distance))
        })
        .collect();
    if pairs.is_empty() {
        return Err(Error::InsufficientData("no states with a canonical temperature".into()));
    }
    let n = pairs.len() as f64;
    let deltas: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    let distances: Vec<f64> = pairs.iter().map(|p| p.3).collect();
    let beta_canonical: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let beta_subsystem: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mean = deltas.iter().sum::<f64>() / n;
    let variance = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
    let stderr = if pairs.len() > 1 { (variance * n / (n - 1.0)).sqrt() / n.sqrt() } else { f64::NAN };
    let delta_hist = freedman_diaconis(&deltas)?;
    let (tail_fit, tail_fit_error) = match fit_tail(&delta_hist, variance) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (pearson, pearson_degenerate) = match pearson_corr(&beta_canonical, &beta_subsystem) {
        Ok(r) => (Some(r), false),
        Err(Error::DegenerateInput(_)) => (None, true),
        Err(e) => return Err(e),
    };
    Ok(FamilyStats {
        count: pairs.len(),
        mean_delta_beta: mean,
        variance_delta_beta: variance,
        stderr_mean_delta_beta: stderr,
        median_abs_delta_beta: median(&deltas.iter().map(|d| d.abs()).collect::<Vec<_>>()),
        mean_min_distance: distances.iter().sum::<f64>() / n,
        median_min_distance: median(&distances),
        delta_beta_histogram: delta_hist,
        min_distance_histogram: freedman_diaconis(&distances)?,
        tail_fit,
        tail_fit_error,
        pearson,
        pearson_degenerate,
        beta_canonical,
        beta_subsystem,
        fraction_pairs: states.iter().map(|s| (s.e_c, s.e_s)).collect(),
    })
}

/// Reduces instance records to per-family statistics. Records are sorted by
/// instance id first, so the result does not depend on input order.
pub fn aggregate_stats(records: &[InstanceRecord]) -> Result<EnsembleStats> {
    let mut sorted: Vec<&InstanceRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.instance_id);
    let accepted: Vec<&InstanceRecord> = sorted.iter().copied().filter(|r| r.accepted).collect();
    if accepted.len() < 2 {
        return Err(Error::InsufficientData(format!("{} accepted instances, need at least 2", accepted.len())));
    }
    let mut rejections = BTreeMap::new();
    for r in sorted.iter().filter(|r| !r.accepted) {
        let reason = r.rejection.map_or("unknown", |x| x.as_str());
        *rejections.entry(reason.to_string()).or_insert(0) += 1;
    }
    let scar: Vec<&StateRecord> = accepted.iter().filter_map(|r| r.scar.as_ref()).collect();
    let thermal: Vec<&StateRecord> = accepted.iter().filter_map(|r| r.thermal.as_ref()).collect();
    let mean_r = accepted.iter().filter_map(|r| r.chaos.map(|c| c.mean_r)).sum::<f64>() / accepted.len() as f64;
    Ok(EnsembleStats {
        n_instances: sorted.len(),
        n_accepted: accepted.len(),
        n_rejected: sorted.len() - accepted.len(),
        rejections,
        mean_r_accepted: mean_r,
        scar: family_stats(&scar)?,
        thermal: family_stats(&thermal)?,
    })
}

/// Compact per-family figures used by the size sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub count: usize,
    pub mean_abs_delta_beta: f64,
    pub median_abs_delta_beta: f64,
    pub mean_min_distance: f64,
    pub median_min_distance: f64,
    pub variance_delta_beta: f64,
    pub pearson: Option<f64>,
}

/// Summary figures of a list of states; empty input gives NaN entries.
pub fn summarize_family(states: &[&StateRecord]) -> FamilySummary {
    let deltas: Vec<f64> = states.iter().filter_map(|s| s.result.delta_beta).collect();
    let abs: Vec<f64> = deltas.iter().map(|d| d.abs()).collect();
    let distances: Vec<f64> = states.iter().map(|s| s.result.min_distance).collect();
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    let m = mean(&deltas);
    let variance = mean(&deltas.iter().map(|d| (d - m).powi(2)).collect::<Vec<_>>());
    let (bc, bs): (Vec<f64>, Vec<f64>) =
        states.iter().filter_map(|s| s.result.beta_canonical.map(|b| (b, s.result.beta_subsystem))).unzip();
    FamilySummary {
        count: states.len(),
        mean_abs_delta_beta: mean(&abs),
        median_abs_delta_beta: median(&abs),
        mean_min_distance: mean(&distances),
        median_min_distance: median(&distances),
        variance_delta_beta: variance,
        pearson: pearson_corr(&bc, &bs).ok(),
    }
}

/// Summary over instances of per-instance band averages: each entry of
/// `bands` is one instance's band, reduced to its mean `|δβ|` and mean
/// `min_d₁` before the mean and median are taken across instances. The
/// variance and correlation pool all states.
pub fn summarize_band_averages(bands: &[&[StateRecord]]) -> FamilySummary {
    let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
    let bands: Vec<&[StateRecord]> = bands.iter().copied().filter(|b| !b.is_empty()).collect();
    let avg_abs: Vec<f64> = bands
        .iter()
        .map(|b| mean(&b.iter().filter_map(|s| s.result.delta_beta.map(f64::abs)).collect::<Vec<_>>()))
        .filter(|x| x.is_finite())
        .collect();
    let avg_dist: Vec<f64> =
        bands.iter().map(|b| mean(&b.iter().map(|s| s.result.min_distance).collect::<Vec<_>>())).collect();
    let pooled: Vec<&StateRecord> = bands.iter().flat_map(|b| b.iter()).collect();
    let all = summarize_family(&pooled);
    FamilySummary {
        count: bands.len(),
        mean_abs_delta_beta: mean(&avg_abs),
        median_abs_delta_beta: median(&avg_abs),
        mean_min_distance: mean(&avg_dist),
        median_min_distance: median(&avg_dist),
        variance_delta_beta: all.variance_delta_beta,
        pearson: all.pearson,
    }
}
