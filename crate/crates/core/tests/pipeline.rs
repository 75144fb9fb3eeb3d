use std::collections::BTreeSet;
use std::fs;

use decarb_core::report::fit_stage;
use decarb_core::{
    analyze, run_pipeline, synthesize_scenario, AnnualSeries, FitConfig, OutputFormat, Rcp,
    RunConfig, ScenarioKey, ScenarioRecord, ScenarioTable, Ssp,
};

const U_MAX: f64 = 1.4;

fn energy(scale: f64) -> AnnualSeries {
    let years: Vec<i32> = (0..10).map(|i| 2010 + 10 * i).collect();
    let values = (0..10).map(|i| scale * (500.0 + 40.0 * i as f64)).collect();
    AnnualSeries::new(years, values, "EJ/yr").unwrap()
}

fn scenarios() -> Vec<(f64, ScenarioRecord)> {
    let config = FitConfig::default();
    let cases = [
        ("GCAM4", Ssp::Ssp4, Rcp::Rcp26, 0.21),
        ("GCAM4", Ssp::Ssp4, Rcp::Baseline, 0.012),
        ("IMAGE", Ssp::Ssp1, Rcp::Rcp19, 0.35),
        ("IMAGE", Ssp::Ssp1, Rcp::Rcp45, 0.05),
        ("MESSAGE-GLOBIOM", Ssp::Ssp2, Rcp::Rcp34, 0.08),
        ("REMIND-MAGPIE", Ssp::Ssp5, Rcp::Rcp60, 0.02),
    ];
    cases
        .iter()
        .enumerate()
        .map(|(i, &(model, ssp, rcp, theta))| {
            let key = ScenarioKey::new(model, ssp, rcp);
            let pe = energy(1.0 + 0.1 * i as f64);
            let record = synthesize_scenario(key, theta, U_MAX, 0.2, &pe, &config).unwrap();
            (theta, record)
        })
        .collect()
}

fn csv_input() -> Vec<u8> {
    let table = ScenarioTable {
        records: scenarios().into_iter().map(|(_, r)| r).collect(),
    };
    let mut bytes = Vec::new();
    table.write_csv(&mut bytes, "World").unwrap();
    // A scenario with no primary-energy row is dropped with a warning.
    bytes.extend_from_slice(
        b"AIM/CGE,SSP3-Baseline,World,Emissions|CO2|Fossil Fuels and Industry,Mt CO2/yr,\
          30000,35000,40000,45000,50000,55000,60000,65000,70000,75000\n",
    );
    // Rows for another region are ignored entirely.
    bytes.extend_from_slice(
        b"AIM/CGE,SSP3-Baseline,R5ASIA,Primary Energy,EJ/yr,1,1,1,1,1,1,1,1,1,1\n",
    );
    bytes
}

fn config() -> RunConfig {
    RunConfig {
        bootstrap_samples: 1000,
        ..RunConfig::default()
    }
}

#[test]
fn fits_recover_every_synthetic_theta_with_override() {
    let run = RunConfig {
        u_max_override: Some(U_MAX),
        ..config()
    };
    let fit = fit_stage(&csv_input(), &run).unwrap();
    assert_eq!(fit.estimates.len(), 6);
    assert_eq!(fit.u_max.source, "override");
    for ((theta, _), est) in scenarios().iter().zip(&fit.estimates) {
        assert!((est.theta - theta).abs() < 1e-6, "{} {theta}", est.theta);
        assert!(est.converged);
    }
    let dropped: Vec<_> = fit.warnings.iter().filter(|w| w.dropped).collect();
    assert_eq!(dropped.len(), 1);
    assert_eq!(dropped[0].model, "AIM/CGE");
}

#[test]
fn ensemble_u_max_comes_from_the_fastest_scenario() {
    let fit = fit_stage(&csv_input(), &config()).unwrap();
    assert_eq!(fit.u_max.source, "ensemble");
    assert_eq!(
        (fit.u_max.model.as_str(), fit.u_max.scenario.as_str()),
        ("IMAGE", "SSP1-19")
    );
    assert_eq!(fit.u_max.year, 2100);
    // u at 2100 under θ = 0.35 over 18 time units.
    let expected = U_MAX * (1.0 - (-0.35f64 * 18.0).exp());
    assert!((fit.u_max.value - expected).abs() < 1e-12);
}

#[test]
fn halving_years_use_the_overridden_u_max() {
    let run = RunConfig {
        u_max_override: Some(1.52),
        ..config()
    };
    let fit = fit_stage(&csv_input(), &run).unwrap();
    let factor = -(1.0 - 0.5 / 1.52f64).ln();
    for est in &fit.estimates {
        let expected = 5.0 * factor / est.theta;
        assert!((est.halving_years - expected).abs() < 1e-9 * expected);
    }
}

#[test]
fn report_sections_are_consistent() {
    let report = analyze(&csv_input(), &config()).unwrap();
    let total: usize = report.buckets.iter().map(|b| b.count).sum();
    assert_eq!(total, report.fit.estimates.len());
    assert_eq!(report.scatter.len(), report.fit.estimates.len());
    assert_eq!(report.lognormal.fit.n, report.fit.estimates.len());
    assert_eq!(
        report.ensemble.histogram.counts.iter().sum::<usize>(),
        total
    );
    for ci in &report.ensemble.bootstrap {
        assert!(ci.lo <= ci.hi);
    }
}

#[test]
fn pipeline_output_is_byte_identical_across_runs() {
    let input_dir = tempfile::tempdir().unwrap();
    let input_path = input_dir.path().join("ssp.csv");
    fs::write(&input_path, csv_input()).unwrap();
    let formats: BTreeSet<OutputFormat> = [OutputFormat::Json, OutputFormat::Csv].into();
    let outputs: Vec<_> = (0..2)
        .map(|_| {
            let out = tempfile::tempdir().unwrap();
            let run = RunConfig {
                input_path: input_path.clone(),
                output_dir: out.path().to_path_buf(),
                formats: formats.clone(),
                ..config()
            };
            run_pipeline(&run).unwrap();
            out
        })
        .collect();
    let names = [
        "warnings.json",
        "estimates.json",
        "estimates.csv",
        "buckets.csv",
        "summary.json",
        "summary.csv",
        "histogram.json",
        "lognormal.json",
        "lognormal.csv",
        "scatter.json",
    ];
    for name in names {
        let a = fs::read(outputs[0].path().join(name)).unwrap();
        let b = fs::read(outputs[1].path().join(name)).unwrap();
        assert!(!a.is_empty(), "{name} empty");
        assert_eq!(a, b, "{name} differs");
    }
}
