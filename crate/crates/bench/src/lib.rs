//! Synthetic inputs shared by the benchmarks.

use decarb_core::{
    synthesize_scenario, AnnualSeries, FitConfig, Rcp, ScenarioKey, ScenarioRecord, Ssp,
};

/// `n` scenarios on a decadal 2010-2100 grid with θ spread log-uniformly
/// over [0.008, 0.4] and u_max fixed at 1.5.
pub fn synthetic_ensemble(n: usize) -> Vec<ScenarioRecord> {
    let config = FitConfig::default();
    let years: Vec<i32> = (0..10).map(|i| 2010 + 10 * i).collect();
    (0..n)
        .map(|i| {
            let frac = i as f64 / n.max(2).saturating_sub(1) as f64;
            let theta = 0.008 * (50.0f64).powf(frac);
            let energy = years
                .iter()
                .enumerate()
                .map(|(k, _)| 480.0 + (7 * k + i % 13) as f64 * 9.0);
            let energy = AnnualSeries::new(years.clone(), energy.collect(), "EJ/yr").unwrap();
            let key = ScenarioKey::new(
                format!("MODEL{}", i / 30),
                Ssp::ALL[i % 5],
                Rcp::ALL[(i / 5) % 6],
            );
            synthesize_scenario(key, theta, 1.5, 0.2, &energy, &config).unwrap()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_are_unique() {
        let records = synthetic_ensemble(126);
        let mut keys: Vec<_> = records.iter().map(|r| r.key.identity()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), 126);
    }
}
