//! Empirical distribution of the θ estimates.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resample;
use crate::speedfit::halving_time;

/// Fewest resamples accepted for a percentile interval.
pub const MIN_RESAMPLES: usize = 1000;
pub const DEFAULT_RESAMPLES: usize = 5000;
/// Percentile interval bounds.
pub const CI_LOWER: f64 = 0.05;
pub const CI_UPPER: f64 = 0.95;

/// Quantile of sorted data by linear interpolation between order
/// statistics at 1-based position 1 + (n − 1)q.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty slice");
    let h = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(next) if frac > 0.0 => sorted[lo] + frac * (next - sorted[lo]),
        _ => sorted[lo],
    }
}

pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (divisor n − 1).
pub fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Mean,
    Median,
    P25,
    P75,
    Std,
}

impl Statistic {
    pub const ALL: [Statistic; 5] = [
        Statistic::Mean,
        Statistic::Median,
        Statistic::P25,
        Statistic::P75,
        Statistic::Std,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Mean => "mean",
            Statistic::Median => "median",
            Statistic::P25 => "p25",
            Statistic::P75 => "p75",
            Statistic::Std => "std",
        }
    }

    /// Evaluates the statistic; may reorder `values`.
    pub fn evaluate(self, values: &mut [f64]) -> f64 {
        let q = match self {
            Statistic::Mean => return mean(values),
            Statistic::Std => return sample_std(values),
            Statistic::Median => 0.5,
            Statistic::P25 => 0.25,
            Statistic::P75 => 0.75,
        };
        values.sort_unstable_by(f64::total_cmp);
        quantile_sorted(values, q)
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|st| st.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown statistic `{s}`")))
    }
}

/// Converts θ values to halving times for one ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalvingScale {
    pub u_max: f64,
    pub time_unit_years: f64,
}

impl HalvingScale {
    /// `None` where θ ≤ 0 or u_max ≤ 0.5.
    pub fn years(&self, theta: f64) -> Option<f64> {
        halving_time(theta, self.u_max, self.time_unit_years).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingYears {
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub p25: Option<f64>,
    pub p75: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub p25: f64,
    pub p75: f64,
    pub halving_years: HalvingYears,
}

impl EnsembleSummary {
    pub fn get(&self, statistic: Statistic) -> f64 {
        match statistic {
            Statistic::Mean => self.mean,
            Statistic::Median => self.median,
            Statistic::P25 => self.p25,
            Statistic::P75 => self.p75,
            Statistic::Std => self.std,
        }
    }
}

fn require(values: &[f64], required: usize) -> Result<()> {
    if values.len() < required {
        return Err(Error::TooFewValues {
            required,
            found: values.len(),
        });
    }
    Ok(())
}

pub fn summary_stats(thetas: &[f64], scale: &HalvingScale) -> Result<EnsembleSummary> {
    require(thetas, 2)?;
    let mut sorted = thetas.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mean, std) = (mean(thetas), sample_std(thetas));
    let (min, max) = (sorted[0], sorted[sorted.len() - 1]);
    let median = quantile_sorted(&sorted, 0.5);
    let p25 = quantile_sorted(&sorted, 0.25);
    let p75 = quantile_sorted(&sorted, 0.75);
    Ok(EnsembleSummary {
        n: thetas.len(),
        mean,
        median,
        std,
        min,
        max,
        p25,
        p75,
        halving_years: HalvingYears {
            mean: scale.years(mean),
            median: scale.years(median),
            std: scale.years(std),
            min: scale.years(min),
            max: scale.years(max),
            p25: scale.years(p25),
            p75: scale.years(p75),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

/// Equal-width bins over [min, max]; the last bin is closed on both sides.
pub fn histogram(values: &[f64], n_bins: usize) -> Result<Histogram> {
    require(values, 1)?;
    if n_bins == 0 {
        return Err(Error::InvalidParameter("n_bins must be at least 1".into()));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (max - min) / n_bins as f64;
    let mut edges: Vec<f64> = (0..=n_bins).map(|i| min + width * i as f64).collect();
    edges[n_bins] = max;
    let mut counts = vec![0; n_bins];
    for v in values {
        let bin = if width > 0.0 {
            (((v - min) / width).floor() as usize).min(n_bins - 1)
        } else {
            0
        };
        counts[bin] += 1;
    }
    Ok(Histogram { edges, counts })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub statistic: Statistic,
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub n_resamples: usize,
    pub seed: u64,
    pub resample_mean: f64,
}

/// 5th/95th percentiles and mean of a set of resample statistics.
pub(crate) fn percentile_summary(
    statistic: Statistic,
    point: f64,
    mut replicates: Vec<f64>,
    seed: u64,
) -> BootstrapResult {
    let n_resamples = replicates.len();
    let resample_mean = mean(&replicates);
    replicates.sort_by(f64::total_cmp);
    BootstrapResult {
        statistic,
        point,
        lo: quantile_sorted(&replicates, CI_LOWER),
        hi: quantile_sorted(&replicates, CI_UPPER),
        n_resamples,
        seed,
        resample_mean,
    }
}

pub(crate) fn check_resamples(n_resamples: usize) -> Result<()> {
    if n_resamples < MIN_RESAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_RESAMPLES} bootstrap resamples, got {n_resamples}"
        )));
    }
    Ok(())
}

/// Nonparametric percentile bootstrap: resamples `values` with replacement.
pub fn bootstrap_ci(
    values: &[f64],
    statistic: Statistic,
    n_resamples: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    require(values, 2)?;
    check_resamples(n_resamples)?;
    let n = values.len();
    let replicates = resample::replicate(seed, n_resamples, |rng, buffer| {
        buffer.clear();
        buffer.extend((0..n).map(|_| values[rng.random_range(0..n)]));
        statistic.evaluate(buffer)
    });
    let point = statistic.evaluate(&mut values.to_vec());
    Ok(percentile_summary(statistic, point, replicates, seed))
}

/// One statistic and its interval, in θ units and as halving times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalvingRow {
    pub statistic: Statistic,
    pub theta: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub years: Option<f64>,
    /// Halving time at the upper θ bound.
    pub years_lo: Option<f64>,
    pub years_hi: Option<f64>,
}

/// Translates each interval into halving times. A larger θ halves sooner,
/// so the years interval is (years(hi), years(lo)).
pub fn halving_time_table(
    summary: &EnsembleSummary,
    cis: &[BootstrapResult],
    scale: &HalvingScale,
) -> Vec<HalvingRow> {
    cis.iter()
        .map(|ci| {
            let theta = summary.get(ci.statistic);
            HalvingRow {
                statistic: ci.statistic,
                theta,
                theta_lo: ci.lo,
                theta_hi: ci.hi,
                years: scale.years(theta),
                years_lo: scale.years(ci.hi),
                years_hi: scale.years(ci.lo),
            }
        })
        .collect()
}
