//! Scenario-specific decarbonization speed.
//!
//! Each scenario's rate path is summarised by a single speed θ in the
//! saturating model `u(τ) = u_max (1 − exp(−θ τ))`, where τ counts time
//! units since the start year. θ is chosen so that cumulative emissions
//! rebuilt from the model (on the scenario's own primary-energy path) match
//! the scenario's reported cumulative emissions as closely as possible, in
//! mean absolute relative distance.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{align_to_start_year_with, AnnualSeries, ScenarioKey, ScenarioRecord};
use crate::intensity::{carbon_intensity, RatePath, KG_PER_KWH_PER_MT_PER_EJ};
use crate::minimize::{grid_then_golden, log_grid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Years per unit of τ. θ is reported per time unit.
    pub time_unit_years: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Points in the coarse log-spaced scan.
    pub grid_points: usize,
    /// Width of the final golden-section bracket on θ.
    pub refine_tol: f64,
    pub start_year: i32,
    pub min_valid_points: usize,
    /// Cumulative-emission points with |CE| below this fraction of max |CE|
    /// are left out of the objective.
    pub ce_epsilon: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            time_unit_years: 5.0,
            theta_min: 1e-4,
            theta_max: 2.0,
            grid_points: 400,
            refine_tol: 1e-10,
            start_year: 2010,
            min_valid_points: 6,
            ce_epsilon: 1e-9,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        if !(self.time_unit_years > 0.0) {
            return bad("time_unit_years must be positive");
        }
        if !(self.theta_min > 0.0 && self.theta_min < self.theta_max) {
            return bad("need 0 < theta_min < theta_max");
        }
        if self.grid_points < 10 {
            return bad("grid_points must be at least 10");
        }
        if !(self.refine_tol > 0.0) {
            return bad("refine_tol must be positive");
        }
        Ok(())
    }
}

/// The saturating rate model with fixed speed and ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateModel {
    pub theta: f64,
    pub u_max: f64,
    pub time_unit_years: f64,
}

impl RateModel {
    pub fn new(theta: f64, u_max: f64, time_unit_years: f64) -> Result<Self> {
        if !(theta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "theta = {theta} must be > 0"
            )));
        }
        if !(u_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "u_max = {u_max} must be > 0"
            )));
        }
        if !(time_unit_years > 0.0) {
            return Err(Error::InvalidParameter("time unit must be > 0".into()));
        }
        Ok(RateModel {
            theta,
            u_max,
            time_unit_years,
        })
    }

    pub fn tau(&self, year: i32, t0: i32) -> f64 {
        f64::from(year - t0) / self.time_unit_years
    }

    pub fn rate(&self, tau: f64) -> f64 {
        rate_at(self.theta, self.u_max, tau)
    }
}

#[inline]
fn rate_at(theta: f64, u_max: f64, tau: f64) -> f64 {
    u_max * (1.0 - (-theta * tau).exp())
}

pub fn reconstruct_rate(model: &RateModel, key: ScenarioKey, years: &[i32], t0: i32) -> RatePath {
    let u = years
        .iter()
        .map(|&y| model.rate(model.tau(y, t0)))
        .collect();
    RatePath {
        key,
        years: years.to_vec(),
        u,
        t0,
    }
}

/// Emissions implied by the rate model applied to `sigma0` on the record's
/// own primary-energy path, in Mt CO2/yr. The record's first year is t0.
pub fn reconstruct_emissions(
    model: &RateModel,
    record: &ScenarioRecord,
    sigma0: f64,
) -> Result<AnnualSeries> {
    let t0 = record.years()[0];
    let values = record
        .years()
        .iter()
        .zip(record.primary_energy().values())
        .map(|(&y, &pe)| {
            sigma0 * (1.0 - model.rate(model.tau(y, t0))) * pe / KG_PER_KWH_PER_MT_PER_EJ
        })
        .collect();
    AnnualSeries::new(record.years().to_vec(), values, "Mt CO2/yr")
}

/// Trapezoidal running integral over the actual year gaps, starting at 0.
pub fn cumulative_emissions(series: &AnnualSeries) -> AnnualSeries {
    let (years, values) = (series.years(), series.values());
    let mut total = 0.0;
    let mut cumulative = Vec::with_capacity(values.len());
    cumulative.push(0.0);
    for k in 1..values.len() {
        total += f64::from(years[k] - years[k - 1]) * (values[k] + values[k - 1]) * 0.5;
        cumulative.push(total);
    }
    AnnualSeries::new(years.to_vec(), cumulative, "Mt CO2").expect("same grid as a valid series")
}

/// Precomputed pieces of one scenario's objective, so that evaluating it
/// for a given θ needs no allocation.
#[derive(Debug, Clone)]
pub struct FitProblem {
    key: ScenarioKey,
    u_max: f64,
    /// Year gaps between consecutive grid points.
    gaps: Vec<f64>,
    tau: Vec<f64>,
    /// Emissions with zero decarbonization, σ(t0)·PE(t)/0.0036.
    baseline: Vec<f64>,
    /// Reported cumulative emissions; `None` where excluded or at t0.
    target: Vec<Option<f64>>,
    included: usize,
    excluded: usize,
}

impl FitProblem {
    pub fn new(record: &ScenarioRecord, u_max: f64, config: &FitConfig) -> Result<Self> {
        config.validate()?;
        if !(u_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "u_max = {u_max} must be > 0"
            )));
        }
        let record = align_to_start_year_with(record, config.start_year, config.min_valid_points)?;
        let sigma0 = carbon_intensity(&record)?.sigma0();
        let years = record.years();
        let t0 = years[0];

        let gaps = years.windows(2).map(|w| f64::from(w[1] - w[0])).collect();
        let tau = years
            .iter()
            .map(|&y| f64::from(y - t0) / config.time_unit_years)
            .collect();
        let baseline = record
            .primary_energy()
            .values()
            .iter()
            .map(|pe| sigma0 * pe / KG_PER_KWH_PER_MT_PER_EJ)
            .collect();

        let ce = cumulative_emissions(record.emissions());
        let ce = &ce.values()[1..];
        let scale = ce.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let threshold = config.ce_epsilon * scale;
        let mut target = vec![None];
        target.extend(
            ce.iter()
                .map(|&v| (scale > 0.0 && v.abs() >= threshold).then_some(v)),
        );
        let included = target.iter().flatten().count();
        let total = ce.len();
        let excluded = total - included;
        if excluded * 2 > total {
            return Err(Error::DegenerateCumulative {
                scenario: record.key.to_string(),
                excluded,
                total,
            });
        }
        Ok(FitProblem {
            key: record.key.clone(),
            u_max,
            gaps,
            tau,
            baseline,
            target,
            included,
            excluded,
        })
    }

    /// Number of grid points left out for near-zero cumulative emissions.
    pub fn excluded(&self) -> usize {
        self.excluded
    }

    /// Mean of |1 − ĈE(t)/CE(t)| over the included points after t0.
    pub fn objective(&self, theta: f64) -> f64 {
        let emission =
            |k: usize| self.baseline[k] * (1.0 - rate_at(theta, self.u_max, self.tau[k]));
        let mut previous = emission(0);
        let mut cumulative = 0.0;
        let mut sum = 0.0;
        for k in 1..self.baseline.len() {
            let current = emission(k);
            cumulative += self.gaps[k - 1] * (current + previous) * 0.5;
            previous = current;
            if let Some(ce) = self.target[k] {
                sum += (1.0 - cumulative / ce).abs();
            }
        }
        sum / self.included as f64
    }
}

/// Objective value for one θ.
pub fn fit_objective(
    theta: f64,
    record: &ScenarioRecord,
    u_max: f64,
    config: &FitConfig,
) -> Result<f64> {
    Ok(FitProblem::new(record, u_max, config)?.objective(theta))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub key: ScenarioKey,
    pub theta: f64,
    pub objective: f64,
    pub halving_years: f64,
    pub u_max_used: f64,
    /// False when the minimum sits on a θ bound.
    pub converged: bool,
}

impl ThetaEstimate {
    pub fn bucket(&self) -> AmbitionBucket {
        AmbitionBucket::from_years(self.halving_years)
    }
}

pub fn fit_theta(record: &ScenarioRecord, u_max: f64, config: &FitConfig) -> Result<ThetaEstimate> {
    let problem = FitProblem::new(record, u_max, config)?;
    let halving_factor = halving_factor(u_max)?;
    let grid = log_grid(config.theta_min, config.theta_max, config.grid_points);
    let best = grid_then_golden(|t| problem.objective(t), &grid, config.refine_tol);
    let at_bound = best.x - config.theta_min <= config.refine_tol
        || config.theta_max - best.x <= config.refine_tol;
    Ok(ThetaEstimate {
        key: problem.key,
        theta: best.x,
        objective: best.fx,
        halving_years: config.time_unit_years * halving_factor / best.x,
        u_max_used: u_max,
        converged: !at_bound,
    })
}

/// Fits every record independently. Output order follows input order and
/// does not depend on the thread pool.
pub fn fit_all(
    records: &[ScenarioRecord],
    u_max: f64,
    config: &FitConfig,
) -> Vec<Result<ThetaEstimate>> {
    records
        .par_iter()
        .map(|r| fit_theta(r, u_max, config))
        .collect()
}

/// Builds a record whose rate path follows the model exactly on the grid of
/// `energy`. The first grid year must be `config.start_year`.
pub fn synthesize_scenario(
    key: ScenarioKey,
    theta_star: f64,
    u_max: f64,
    sigma0: f64,
    energy: &AnnualSeries,
    config: &FitConfig,
) -> Result<ScenarioRecord> {
    let model = RateModel::new(theta_star, u_max, config.time_unit_years)?;
    if !(sigma0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sigma0 = {sigma0} must be > 0"
        )));
    }
    let t0 = energy.years()[0];
    if t0 != config.start_year {
        return Err(Error::InvalidParameter(format!(
            "energy path starts in {t0}, not {}",
            config.start_year
        )));
    }
    let emissions = energy
        .years()
        .iter()
        .zip(energy.values())
        .map(|(&y, &pe)| {
            sigma0 * (1.0 - model.rate(model.tau(y, t0))) * pe / KG_PER_KWH_PER_MT_PER_EJ
        })
        .collect();
    let emissions = AnnualSeries::new(energy.years().to_vec(), emissions, "Mt CO2/yr")?;
    ScenarioRecord::new(key, emissions, energy.clone(), config.start_year)
}

/// ln(1 − 0.5/u_max) negated: time units to halve intensity at θ = 1.
fn halving_factor(u_max: f64) -> Result<f64> {
    if !(u_max > 0.5) {
        return Err(Error::NeverHalves(u_max));
    }
    Ok(-(1.0 - 0.5 / u_max).ln())
}

/// Years for σ to fall to half of σ(t0) under the rate model.
pub fn halving_time(theta: f64, u_max: f64, time_unit_years: f64) -> Result<f64> {
    let factor = halving_factor(u_max)?;
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} must be > 0"
        )));
    }
    Ok(time_unit_years * factor / theta)
}

/// Classification of halving times into ambition classes (years).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AmbitionBucket {
    UpTo10,
    From10To20,
    From20To30,
    From30To40,
    From40To50,
    From50To90,
    Over90,
}

impl AmbitionBucket {
    pub const ALL: [AmbitionBucket; 7] = [
        AmbitionBucket::UpTo10,
        AmbitionBucket::From10To20,
        AmbitionBucket::From20To30,
        AmbitionBucket::From30To40,
        AmbitionBucket::From40To50,
        AmbitionBucket::From50To90,
        AmbitionBucket::Over90,
    ];

    /// Upper bounds are inclusive: 20.0 falls in `(10,20]`.
    pub fn from_years(years: f64) -> Self {
        const UPPER: [f64; 6] = [10.0, 20.0, 30.0, 40.0, 50.0, 90.0];
        UPPER
            .iter()
            .position(|&u| years <= u)
            .map_or(AmbitionBucket::Over90, |i| Self::ALL[i])
    }

    pub fn label(self) -> &'static str {
        match self {
            AmbitionBucket::UpTo10 => "<10",
            AmbitionBucket::From10To20 => "(10,20]",
            AmbitionBucket::From20To30 => "(20,30]",
            AmbitionBucket::From30To40 => "(30,40]",
            AmbitionBucket::From40To50 => "(40,50]",
            AmbitionBucket::From50To90 => "(50,90]",
            AmbitionBucket::Over90 => ">90",
        }
    }

    /// Lower and upper bound in years; the first bucket starts at 0.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            AmbitionBucket::UpTo10 => (0.0, 10.0),
            AmbitionBucket::From10To20 => (10.0, 20.0),
            AmbitionBucket::From20To30 => (20.0, 30.0),
            AmbitionBucket::From30To40 => (30.0, 40.0),
            AmbitionBucket::From40To50 => (40.0, 50.0),
            AmbitionBucket::From50To90 => (50.0, 90.0),
            AmbitionBucket::Over90 => (90.0, f64::INFINITY),
        }
    }
}

pub fn ambition_bucket(halving_years: f64) -> AmbitionBucket {
    AmbitionBucket::from_years(halving_years)
}

impl fmt::Display for AmbitionBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
