//! Carbon intensity and decarbonization-rate trajectories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{ScenarioKey, ScenarioRecord};

/// kg CO2 per kWh for one Mt CO2 per EJ: 1e9 kg / (1e18 J / 3.6e6 J/kWh).
pub const KG_PER_KWH_PER_MT_PER_EJ: f64 = 3.6e-3;

/// Carbon intensity σ(t) in kgCO2/kWh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntensityPath {
    pub key: ScenarioKey,
    pub years: Vec<i32>,
    pub sigma: Vec<f64>,
    pub t0: i32,
}

impl IntensityPath {
    pub fn sigma0(&self) -> f64 {
        self.sigma[0]
    }
}

/// Relative intensity improvement u(t) = 1 − σ(t)/σ(t0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePath {
    pub key: ScenarioKey,
    pub years: Vec<i32>,
    pub u: Vec<f64>,
    pub t0: i32,
}

pub fn intensity_kg_per_kwh(emissions_mt: f64, energy_ej: f64) -> f64 {
    emissions_mt / energy_ej * KG_PER_KWH_PER_MT_PER_EJ
}

/// Computes σ over the record's grid; the first grid year is t0.
pub fn carbon_intensity(record: &ScenarioRecord) -> Result<IntensityPath> {
    let sigma: Vec<f64> = record
        .emissions()
        .values()
        .iter()
        .zip(record.primary_energy().values())
        .map(|(e, p)| intensity_kg_per_kwh(*e, *p))
        .collect();
    if !(sigma[0] > 0.0) {
        return Err(Error::NonPositiveInitialIntensity {
            scenario: record.key.to_string(),
            sigma0: sigma[0],
        });
    }
    Ok(IntensityPath {
        key: record.key.clone(),
        years: record.years().to_vec(),
        sigma,
        t0: record.years()[0],
    })
}

pub fn decarb_rate(path: &IntensityPath) -> Result<RatePath> {
    let sigma0 = path.sigma0();
    if !(sigma0 > 0.0) {
        return Err(Error::NonPositiveInitialIntensity {
            scenario: path.key.to_string(),
            sigma0,
        });
    }
    let mut u: Vec<f64> = path.sigma.iter().map(|s| 1.0 - s / sigma0).collect();
    u[0] = 0.0;
    Ok(RatePath {
        key: path.key.clone(),
        years: path.years.clone(),
        u,
        t0: path.t0,
    })
}

/// The largest decarbonization rate in an ensemble and where it occurs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UMax {
    pub value: f64,
    pub key: ScenarioKey,
    pub year: i32,
}

pub fn global_u_max(rates: &[RatePath]) -> Result<UMax> {
    let mut best: Option<UMax> = None;
    for path in rates {
        for (year, u) in path.years.iter().zip(&path.u) {
            if best.as_ref().map_or(true, |b| *u > b.value) {
                best = Some(UMax {
                    value: *u,
                    key: path.key.clone(),
                    year: *year,
                });
            }
        }
    }
    best.ok_or(Error::EmptyEnsemble)
}
