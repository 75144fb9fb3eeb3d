use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use decarb_core::{
    synthesize_scenario, AnnualSeries, FitConfig, Rcp, ScenarioKey, ScenarioTable, Ssp,
};
use serde_json::Value;

fn write_input(dir: &Path) -> PathBuf {
    let years: Vec<i32> = (0..10).map(|i| 2010 + 10 * i).collect();
    let config = FitConfig::default();
    let records = [
        (Ssp::Ssp1, Rcp::Rcp19, 0.3),
        (Ssp::Ssp2, Rcp::Rcp45, 0.06),
        (Ssp::Ssp3, Rcp::Baseline, 0.01),
        (Ssp::Ssp4, Rcp::Rcp26, 0.15),
    ]
    .iter()
    .map(|&(ssp, rcp, theta)| {
        let pe = AnnualSeries::new(years.clone(), vec![520.0; 10], "EJ/yr").unwrap();
        synthesize_scenario(
            ScenarioKey::new("GCAM4", ssp, rcp),
            theta,
            1.3,
            0.2,
            &pe,
            &config,
        )
        .unwrap()
    })
    .collect();
    let mut bytes = Vec::new();
    ScenarioTable { records }
        .write_csv(&mut bytes, "World")
        .unwrap();
    let path = dir.join("input.csv");
    fs::write(&path, bytes).unwrap();
    path
}

fn decarb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decarb"))
        .args(args)
        .env_remove("DECARB_SEED")
        .output()
        .unwrap()
}

fn read_json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn report_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path());
    let out = dir.path().join("out");
    let result = decarb(&[
        "report",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--bootstrap-samples",
        "1000",
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    for name in [
        "estimates.csv",
        "estimates.json",
        "summary.json",
        "histogram.json",
        "scatter.json",
        "lognormal.json",
        "buckets.csv",
    ] {
        assert!(out.join(name).is_file(), "missing {name}");
    }
    let buckets = fs::read_to_string(out.join("buckets.csv")).unwrap();
    assert_eq!(buckets.lines().count(), 8);
    let summary = read_json(out.join("summary.json"));
    assert_eq!(summary["bootstrap"][0]["B"], 1000);
    assert_eq!(summary["bootstrap"][0]["seed"], 42);
}

#[test]
fn u_max_override_sets_halving_constant() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path());
    let out = dir.path().join("fit");
    let result = decarb(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--u-max",
        "1.52",
        "--format",
        "json",
    ]);
    assert!(
        result.status.success(),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(!out.join("estimates.csv").exists());
    let doc = read_json(out.join("estimates.json"));
    assert_eq!(doc["u_max"]["source"], "override");
    let factor = -(1.0 - 0.5 / 1.52f64).ln();
    for e in doc["estimates"].as_array().unwrap() {
        let theta = e["theta"].as_f64().unwrap();
        let years = e["halving_years"].as_f64().unwrap();
        assert!((years - 5.0 * factor / theta).abs() < 1e-8 * years);
    }
}

#[test]
fn seed_comes_from_environment_unless_flag_given() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path());
    let seed_of = |env_seed: &str, flag: Option<&str>| {
        let out = dir
            .path()
            .join(format!("s{env_seed}{}", flag.unwrap_or("")));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_decarb"));
        cmd.args([
            "stats",
            "--input",
            input.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .args(["--bootstrap-samples", "1000"])
        .env("DECARB_SEED", env_seed);
        if let Some(s) = flag {
            cmd.args(["--seed", s]);
        }
        assert!(cmd.output().unwrap().status.success());
        read_json(out.join("summary.json"))["bootstrap"][0]["seed"]
            .as_u64()
            .unwrap()
    };
    assert_eq!(seed_of("7", None), 7);
    assert_eq!(seed_of("7", Some("9")), 9);
}

#[test]
fn ingest_and_lognormal_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path());
    let out = dir.path().join("o");
    let (input, out_s) = (input.to_str().unwrap(), out.to_str().unwrap());
    assert!(decarb(&["ingest", "--input", input, "--out", out_s])
        .status
        .success());
    let table = read_json(out.join("scenarios.json"));
    assert_eq!(table["scenarios"].as_array().unwrap().len(), 4);
    let args = [
        "lognormal",
        "--input",
        input,
        "--out",
        out_s,
        "--bootstrap-samples",
        "1000",
    ];
    assert!(decarb(&args).status.success());
    let ln = read_json(out.join("lognormal.json"));
    assert_eq!(ln["fit"]["n"], 4);
    assert!(out.join("lognormal.csv").is_file());
}

#[test]
fn error_classes_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();

    let missing = dir.path().join("nope.csv");
    let code = decarb(&["report", "--input", missing.to_str().unwrap(), "--out", out])
        .status
        .code();
    assert_eq!(code, Some(14));

    let bad_unit = dir.path().join("bad.csv");
    fs::write(
        &bad_unit,
        "MODEL,SCENARIO,REGION,VARIABLE,UNIT,2010,2020\n\
         GCAM4,SSP1-19,World,Primary Energy,TWh/yr,1,2\n",
    )
    .unwrap();
    let code = decarb(&[
        "ingest",
        "--input",
        bad_unit.to_str().unwrap(),
        "--out",
        out,
    ])
    .status
    .code();
    assert_eq!(code, Some(10));

    let input = write_input(dir.path());
    let code = decarb(&[
        "fit",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out,
        "--u-max",
        "0.4",
    ])
    .status
    .code();
    assert_eq!(code, Some(12));

    let code = decarb(&[
        "report",
        "--input",
        input.to_str().unwrap(),
        "--bootstrap-samples",
        "10",
    ])
    .status
    .code();
    assert_eq!(code, Some(12));
}

#[test]
fn unusable_scenario_is_named_in_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path());
    let mut text = fs::read_to_string(&input).unwrap();
    text.push_str(
        "IMAGE,SSP2-26,World,Emissions|CO2|Fossil Fuels and Industry,Mt CO2/yr,\
         -5,1,1,1,1,1,1,1,1,1\n\
         IMAGE,SSP2-26,World,Primary Energy,EJ/yr,500,500,500,500,500,500,500,500,500,500\n",
    );
    fs::write(&input, text).unwrap();
    let out = dir.path().join("o");
    let result = decarb(&[
        "report",
        "--input",
        input.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--bootstrap-samples",
        "1000",
    ]);
    assert!(result.status.success());
    assert!(String::from_utf8_lossy(&result.stderr).contains("IMAGE/SSP2-26"));
    let warnings = read_json(out.join("warnings.json"));
    assert_eq!(warnings["warnings"][0]["scenario"], "SSP2-26");
    assert_eq!(warnings["warnings"][0]["dropped"], true);
}
