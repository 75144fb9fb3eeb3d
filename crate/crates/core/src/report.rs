//! End-to-end pipeline, ambition tables, scatter layout and report writers.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::ensemble::{
    bootstrap_ci, halving_time_table, histogram, summary_stats, BootstrapResult, EnsembleSummary,
    HalvingRow, HalvingScale, Histogram, Statistic,
};
use crate::error::{Error, Result};
use crate::ingest::{
    align_to_start_year_with, parse_scenario_csv, IngestConfig, IngestWarning, Rcp, ScenarioRecord,
    ScenarioTable, Ssp,
};
use crate::intensity::{carbon_intensity, decarb_rate, global_u_max};
use crate::lognormal::{
    density_curve, lognormal_mle, lognormal_stats, parametric_bootstrap, DensityCurve,
    LognormalFit, LognormalStats,
};
use crate::output::{format_float, to_canonical_json};
use crate::speedfit::{fit_all, AmbitionBucket, FitConfig, ThetaEstimate};

/// Statistics reported with bootstrap intervals.
pub const REPORTED_STATISTICS: [Statistic; 4] = [
    Statistic::Mean,
    Statistic::Median,
    Statistic::P25,
    Statistic::P75,
];
pub const HISTOGRAM_BINS: usize = 10;
const DENSITY_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_path: PathBuf,
    pub region: String,
    pub start_year: i32,
    pub time_unit_years: f64,
    pub u_max_override: Option<f64>,
    pub seed: u64,
    pub bootstrap_samples: usize,
    pub output_dir: PathBuf,
    pub formats: BTreeSet<OutputFormat>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input_path: PathBuf::new(),
            region: "World".into(),
            start_year: 2010,
            time_unit_years: 5.0,
            u_max_override: None,
            seed: 42,
            bootstrap_samples: crate::ensemble::DEFAULT_RESAMPLES,
            output_dir: PathBuf::from("out"),
            formats: [OutputFormat::Json, OutputFormat::Csv].into(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.bootstrap_samples < crate::ensemble::MIN_RESAMPLES {
            return Err(Error::InvalidParameter(format!(
                "bootstrap_samples must be at least {}",
                crate::ensemble::MIN_RESAMPLES
            )));
        }
        if !(2005..=2050).contains(&self.start_year) {
            return Err(Error::InvalidParameter(format!(
                "start year {} outside [2005, 2050]",
                self.start_year
            )));
        }
        if let Some(u) = self.u_max_override {
            if !(u > 0.5) {
                return Err(Error::NeverHalves(u));
            }
        }
        self.fit_config().validate()
    }

    pub fn ingest_config(&self) -> IngestConfig {
        IngestConfig {
            region: self.region.clone(),
            start_year: self.start_year,
            ..IngestConfig::default()
        }
    }

    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            time_unit_years: self.time_unit_years,
            start_year: self.start_year,
            ..FitConfig::default()
        }
    }

    pub fn halving_scale(&self, u_max: f64) -> HalvingScale {
        HalvingScale {
            u_max,
            time_unit_years: self.time_unit_years,
        }
    }
}

/// Where u_max came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UMaxReport {
    pub value: f64,
    /// `ensemble` or `override`.
    pub source: String,
    /// Ensemble maximum, reported even when overridden.
    pub ensemble_value: f64,
    pub model: String,
    pub scenario: String,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitStage {
    pub table: ScenarioTable,
    pub u_max: UMaxReport,
    pub estimates: Vec<ThetaEstimate>,
    /// Ingest warnings plus every scenario dropped during alignment, intensity
    /// or fitting, sorted by (model, scenario).
    pub warnings: Vec<IngestWarning>,
}

impl FitStage {
    pub fn thetas(&self) -> Vec<f64> {
        self.estimates.iter().map(|e| e.theta).collect()
    }
}

fn drop_warning(record: &ScenarioRecord, err: &Error) -> IngestWarning {
    IngestWarning {
        model: record.key.model.clone(),
        scenario: record.key.raw_name.clone(),
        reason: err.to_string(),
        dropped: true,
    }
}

/// Ingests `input` and fits θ for every usable scenario.
pub fn fit_stage(input: &[u8], config: &RunConfig) -> Result<FitStage> {
    config.validate()?;
    let fit_config = config.fit_config();
    let parsed = parse_scenario_csv(input, &config.ingest_config())?;
    let mut warnings = parsed.warnings;

    let mut usable = Vec::new();
    let mut rates = Vec::new();
    for record in &parsed.table.records {
        let prepared =
            align_to_start_year_with(record, config.start_year, fit_config.min_valid_points)
                .and_then(|aligned| {
                    let rate = decarb_rate(&carbon_intensity(&aligned)?)?;
                    Ok((aligned, rate))
                });
        match prepared {
            Ok((aligned, rate)) => {
                usable.push(aligned);
                rates.push(rate);
            }
            Err(e) => warnings.push(drop_warning(record, &e)),
        }
    }
    let ensemble_max = global_u_max(&rates)?;
    let u_max = UMaxReport {
        value: config.u_max_override.unwrap_or(ensemble_max.value),
        source: if config.u_max_override.is_some() {
            "override"
        } else {
            "ensemble"
        }
        .into(),
        ensemble_value: ensemble_max.value,
        model: ensemble_max.key.model.clone(),
        scenario: ensemble_max.key.raw_name.clone(),
        year: ensemble_max.year,
    };
    info!(
        "u_max = {} ({}; ensemble maximum {} in {}/{} at {})",
        u_max.value, u_max.source, u_max.ensemble_value, u_max.model, u_max.scenario, u_max.year
    );
    if !(u_max.value > 0.5) {
        return Err(Error::NeverHalves(u_max.value));
    }

    let mut estimates = Vec::new();
    for (record, result) in usable
        .iter()
        .zip(fit_all(&usable, u_max.value, &fit_config))
    {
        match result {
            Ok(estimate) => {
                if !estimate.converged {
                    warn!("{}: θ on search bound ({})", estimate.key, estimate.theta);
                }
                estimates.push(estimate);
            }
            Err(e) => warnings.push(drop_warning(record, &e)),
        }
    }
    warnings.sort();
    for w in &warnings {
        warn!("{w}");
    }
    Ok(FitStage {
        table: parsed.table,
        u_max,
        estimates,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub summary: EnsembleSummary,
    pub bootstrap: Vec<BootstrapResult>,
    pub halving_table: Vec<HalvingRow>,
    pub histogram: Histogram,
}

pub fn ensemble_stage(
    thetas: &[f64],
    scale: &HalvingScale,
    config: &RunConfig,
) -> Result<EnsembleReport> {
    let summary = summary_stats(thetas, scale)?;
    let bootstrap = REPORTED_STATISTICS
        .iter()
        .map(|&st| bootstrap_ci(thetas, st, config.bootstrap_samples, config.seed))
        .collect::<Result<Vec<_>>>()?;
    let halving_table = halving_time_table(&summary, &bootstrap, scale);
    Ok(EnsembleReport {
        summary,
        bootstrap,
        halving_table,
        histogram: histogram(thetas, HISTOGRAM_BINS)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LognormalReport {
    pub fit: LognormalFit,
    pub stats: LognormalStats,
    pub bootstrap: Vec<BootstrapResult>,
    pub halving_table: Vec<HalvingRow>,
    pub density: DensityCurve,
}

pub fn lognormal_stage(
    thetas: &[f64],
    scale: &HalvingScale,
    config: &RunConfig,
) -> Result<LognormalReport> {
    let fit = lognormal_mle(thetas)?;
    let stats = lognormal_stats(&fit);
    let bootstrap = REPORTED_STATISTICS
        .iter()
        .map(|&st| parametric_bootstrap(&fit, fit.n, config.bootstrap_samples, st, config.seed))
        .collect::<Result<Vec<_>>>()?;
    let halving_table = bootstrap
        .iter()
        .map(|ci| HalvingRow {
            statistic: ci.statistic,
            theta: ci.point,
            theta_lo: ci.lo,
            theta_hi: ci.hi,
            years: scale.years(ci.point),
            years_lo: scale.years(ci.hi),
            years_hi: scale.years(ci.lo),
        })
        .collect();
    let upper = thetas.iter().copied().fold(0.0, f64::max) * 1.5;
    let density = density_curve(&fit, upper, DENSITY_POINTS)?;
    Ok(LognormalReport {
        fit,
        stats,
        bootstrap,
        halving_table,
        density,
    })
}

/// One row of the ambition overview.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub bucket: AmbitionBucket,
    pub count: usize,
    pub ssps: String,
    pub rcps: String,
    pub models: String,
}

fn join_tokens<I: IntoIterator<Item = String>>(prefix: &str, tokens: I) -> String {
    let tokens: Vec<String> = tokens.into_iter().collect();
    if tokens.is_empty() {
        return "n.a.".into();
    }
    format!("{prefix}{}", tokens.join("/"))
}

fn rcp_label(rcps: &BTreeSet<Rcp>) -> String {
    if rcps.len() == Rcp::ALL.len() {
        return "all".into();
    }
    let numeric: Vec<String> = rcps
        .iter()
        .filter(|r| **r != Rcp::Baseline)
        .map(|r| r.token().to_string())
        .collect();
    let mut parts = Vec::new();
    if !numeric.is_empty() {
        parts.push(format!("RCP{}", numeric.join("/")));
    }
    if rcps.contains(&Rcp::Baseline) {
        parts.push("Baseline".into());
    }
    if parts.is_empty() {
        "n.a.".into()
    } else {
        parts.join("/")
    }
}

/// Counts estimates per ambition bucket with the SSPs, RCPs and models that
/// occur in each. `all` means every SSP (or RCP, or every model seen in
/// `estimates`) appears at least once.
pub fn bucket_counts(estimates: &[ThetaEstimate]) -> Vec<BucketRow> {
    let all_models: BTreeSet<&str> = estimates.iter().map(|e| e.key.model.as_str()).collect();
    AmbitionBucket::ALL
        .iter()
        .map(|&bucket| {
            let members: Vec<&ThetaEstimate> =
                estimates.iter().filter(|e| e.bucket() == bucket).collect();
            let ssps: BTreeSet<Ssp> = members.iter().map(|e| e.key.ssp).collect();
            let rcps: BTreeSet<Rcp> = members.iter().map(|e| e.key.rcp).collect();
            let models: BTreeSet<&str> = members.iter().map(|e| e.key.model.as_str()).collect();
            let ssps = if ssps.len() == Ssp::ALL.len() {
                "all".into()
            } else {
                join_tokens("SSP", ssps.iter().map(|s| s.ordinal().to_string()))
            };
            let models = if !models.is_empty() && models == all_models {
                "all".into()
            } else {
                join_tokens("", models.iter().map(|m| m.to_string()))
            };
            BucketRow {
                bucket,
                count: members.len(),
                ssps,
                rcps: rcp_label(&rcps),
                models,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScatterDatum {
    pub ssp_ordinal: u8,
    pub rcp_ordinal: u8,
    pub offset: f64,
    pub theta: f64,
    pub model: String,
}

/// Places each estimate at its SSP×RCP cell, spreading the models in a cell
/// alphabetically around the centre 0.1 apart (closer if more than seven
/// share a cell, so offsets stay within ±0.3).
pub fn scatter_grid(estimates: &[ThetaEstimate]) -> Vec<ScatterDatum> {
    let mut cells: BTreeMap<(Ssp, Rcp), Vec<&ThetaEstimate>> = BTreeMap::new();
    for e in estimates {
        cells.entry((e.key.ssp, e.key.rcp)).or_default().push(e);
    }
    let mut out = Vec::with_capacity(estimates.len());
    for ((ssp, rcp), mut members) in cells {
        members.sort_by(|a, b| a.key.model.cmp(&b.key.model));
        let m = members.len();
        let spacing = if m > 1 {
            0.1f64.min(0.6 / (m - 1) as f64)
        } else {
            0.0
        };
        for (k, e) in members.into_iter().enumerate() {
            out.push(ScatterDatum {
                ssp_ordinal: ssp.ordinal(),
                rcp_ordinal: rcp.ordinal(),
                offset: (k as f64 - (m as f64 - 1.0) / 2.0) * spacing,
                theta: e.theta,
                model: e.key.model.clone(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub fit: FitStage,
    pub ensemble: EnsembleReport,
    pub lognormal: LognormalReport,
    pub buckets: Vec<BucketRow>,
    pub scatter: Vec<ScatterDatum>,
}

/// Runs the whole analysis on in-memory CSV bytes.
pub fn analyze(input: &[u8], config: &RunConfig) -> Result<RunReport> {
    let fit = fit_stage(input, config)?;
    let thetas = fit.thetas();
    let scale = config.halving_scale(fit.u_max.value);
    let ensemble = ensemble_stage(&thetas, &scale, config)?;
    let lognormal = lognormal_stage(&thetas, &scale, config)?;
    let buckets = bucket_counts(&fit.estimates);
    let scatter = scatter_grid(&fit.estimates);
    Ok(RunReport {
        fit,
        ensemble,
        lognormal,
        buckets,
        scatter,
    })
}

/// Reads `config.input_path`, runs [`analyze`] and writes every output.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    let input = read_input(&config.input_path)?;
    let report = analyze(&input, config)?;
    let writer = ReportWriter::new(&config.output_dir, &config.formats)?;
    writer.warnings(&report.fit.warnings)?;
    writer.estimates(&report.fit)?;
    writer.buckets(&report.buckets)?;
    writer.ensemble(&report.ensemble, &report.fit)?;
    writer.lognormal(&report.lognormal)?;
    writer.scatter(&report.scatter)?;
    Ok(report)
}

pub fn read_input(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Writes report files into one directory.
pub struct ReportWriter {
    dir: PathBuf,
    formats: BTreeSet<OutputFormat>,
}

fn csv_text<F>(build: F) -> Result<String>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>,
{
    let mut writer = csv::Writer::from_writer(Vec::new());
    build(&mut writer)?;
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

impl ReportWriter {
    pub fn new(dir: &Path, formats: &BTreeSet<OutputFormat>) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(ReportWriter {
            dir: dir.to_path_buf(),
            formats: formats.clone(),
        })
    }

    fn json(&self) -> bool {
        self.formats.contains(&OutputFormat::Json)
    }

    fn csv(&self) -> bool {
        self.formats.contains(&OutputFormat::Csv)
    }

    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        info!("wrote {}", path.display());
        Ok(())
    }

    pub fn table(&self, table: &ScenarioTable, region: &str) -> Result<()> {
        if self.json() {
            self.write("scenarios.json", &to_canonical_json(&table.to_json())?)?;
        }
        if self.csv() {
            let mut bytes = Vec::new();
            table.write_csv(&mut bytes, region)?;
            self.write("scenarios.csv", &String::from_utf8_lossy(&bytes))?;
        }
        Ok(())
    }

    pub fn warnings(&self, warnings: &[IngestWarning]) -> Result<()> {
        self.write(
            "warnings.json",
            &to_canonical_json(&json!({ "warnings": warnings }))?,
        )
    }

    pub fn estimates(&self, fit: &FitStage) -> Result<()> {
        if self.json() {
            let rows: Vec<_> = fit
                .estimates
                .iter()
                .map(|e| {
                    json!({
                        "model": e.key.model,
                        "scenario": e.key.raw_name,
                        "ssp": e.key.ssp.to_string(),
                        "rcp": e.key.rcp.to_string(),
                        "theta": e.theta,
                        "objective": e.objective,
                        "halving_years": e.halving_years,
                        "bucket": e.bucket().label(),
                        "converged": e.converged,
                    })
                })
                .collect();
            let doc = json!({ "estimates": rows, "u_max": fit.u_max, "warnings": fit.warnings });
            self.write("estimates.json", &to_canonical_json(&doc)?)?;
        }
        if self.csv() {
            let text = csv_text(|w| {
                w.write_record([
                    "model",
                    "scenario",
                    "ssp",
                    "rcp",
                    "theta",
                    "objective",
                    "halving_years",
                    "bucket",
                    "converged",
                ])?;
                for e in &fit.estimates {
                    w.write_record([
                        e.key.model.clone(),
                        e.key.raw_name.clone(),
                        e.key.ssp.to_string(),
                        e.key.rcp.to_string(),
                        format_float(e.theta),
                        format_float(e.objective),
                        format_float(e.halving_years),
                        e.bucket().label().to_string(),
                        e.converged.to_string(),
                    ])?;
                }
                Ok(())
            })?;
            self.write("estimates.csv", &text)?;
        }
        Ok(())
    }

    pub fn buckets(&self, rows: &[BucketRow]) -> Result<()> {
        let text = csv_text(|w| {
            w.write_record(["bucket", "count", "ssps", "rcps", "models"])?;
            for r in rows {
                w.write_record([
                    r.bucket.label().to_string(),
                    r.count.to_string(),
                    r.ssps.clone(),
                    r.rcps.clone(),
                    r.models.clone(),
                ])?;
            }
            Ok(())
        })?;
        self.write("buckets.csv", &text)
    }

    pub fn ensemble(&self, report: &EnsembleReport, fit: &FitStage) -> Result<()> {
        if self.json() {
            let bootstrap: Vec<_> = report.bootstrap.iter().map(bootstrap_json).collect();
            let doc = json!({
                "summary": report.summary,
                "bootstrap": bootstrap,
                "halving_table": report.halving_table,
                "histogram": report.histogram,
                "u_max": fit.u_max,
                "warnings": fit.warnings,
            });
            self.write("summary.json", &to_canonical_json(&doc)?)?;
            self.write("histogram.json", &to_canonical_json(&report.histogram)?)?;
        }
        if self.csv() {
            self.write("summary.csv", &halving_csv(&report.halving_table)?)?;
        }
        Ok(())
    }

    pub fn lognormal(&self, report: &LognormalReport) -> Result<()> {
        if self.json() {
            let bootstrap: Vec<_> = report.bootstrap.iter().map(bootstrap_json).collect();
            let doc = json!({
                "fit": report.fit,
                "stats": report.stats,
                "bootstrap": bootstrap,
                "halving_table": report.halving_table,
                "density": report.density,
            });
            self.write("lognormal.json", &to_canonical_json(&doc)?)?;
        }
        if self.csv() {
            self.write("lognormal.csv", &halving_csv(&report.halving_table)?)?;
        }
        Ok(())
    }

    pub fn scatter(&self, points: &[ScatterDatum]) -> Result<()> {
        if self.json() {
            self.write(
                "scatter.json",
                &to_canonical_json(&json!({ "points": points }))?,
            )?;
        }
        Ok(())
    }
}

fn bootstrap_json(b: &BootstrapResult) -> serde_json::Value {
    json!({
        "statistic": b.statistic,
        "point": b.point,
        "lo": b.lo,
        "hi": b.hi,
        "seed": b.seed,
        "B": b.n_resamples,
        "resample_mean": b.resample_mean,
    })
}

fn halving_csv(rows: &[HalvingRow]) -> Result<String> {
    csv_text(|w| {
        w.write_record([
            "statistic",
            "theta",
            "theta_lo",
            "theta_hi",
            "years",
            "years_lo",
            "years_hi",
        ])?;
        for r in rows {
            w.write_record([
                r.statistic.name().to_string(),
                format_float(r.theta),
                format_float(r.theta_lo),
                format_float(r.theta_hi),
                opt_float(r.years),
                opt_float(r.years_lo),
                opt_float(r.years_hi),
            ])?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::ScenarioKey;

    fn estimate(model: &str, ssp: Ssp, rcp: Rcp, halving_years: f64) -> ThetaEstimate {
        ThetaEstimate {
            key: ScenarioKey::new(model, ssp, rcp),
            theta: 1.0 / halving_years,
            objective: 0.0,
            halving_years,
            u_max_used: 1.52,
            converged: true,
        }
    }

    #[test]
    fn empty_bucket_table() {
        let rows = bucket_counts(&[]);
        assert_eq!(rows.len(), 7);
        assert!(rows
            .iter()
            .all(|r| r.count == 0 && r.ssps == "n.a." && r.rcps == "n.a."));
    }

    #[test]
    fn single_estimate_bucket() {
        let rows = bucket_counts(&[estimate("GCAM", Ssp::Ssp2, Rcp::Rcp26, 15.0)]);
        let counts: Vec<usize> = rows.iter().map(|r| r.count).collect();
        assert_eq!(counts, vec![0, 1, 0, 0, 0, 0, 0]);
        assert_eq!(rows[1].ssps, "SSP2");
        assert_eq!(rows[1].rcps, "RCP26");
        assert_eq!(rows[1].models, "all");
    }

    #[test]
    fn bucket_labels_follow_table_style() {
        let mut es: Vec<ThetaEstimate> = Ssp::ALL
            .iter()
            .map(|&s| estimate("AIM/CGE", s, Rcp::Rcp19, 12.0))
            .collect();
        es.push(estimate("GCAM", Ssp::Ssp2, Rcp::Rcp60, 95.0));
        es.push(estimate("GCAM", Ssp::Ssp3, Rcp::Baseline, 120.0));
        es.push(estimate("IMAGE", Ssp::Ssp1, Rcp::Rcp26, 14.0));
        let rows = bucket_counts(&es);
        assert_eq!(rows[1].ssps, "all");
        assert_eq!(rows[1].rcps, "RCP19/26");
        assert_eq!(rows[1].models, "AIM/CGE/IMAGE");
        assert_eq!(rows[6].ssps, "SSP2/3");
        assert_eq!(rows[6].rcps, "RCP60/Baseline");
        assert_eq!(rows.iter().map(|r| r.count).sum::<usize>(), es.len());
    }

    #[test]
    fn scatter_offsets_center_each_cell() {
        let es = vec![
            estimate("WITCH-GLOBIOM", Ssp::Ssp1, Rcp::Rcp19, 12.0),
            estimate("AIM/CGE", Ssp::Ssp1, Rcp::Rcp19, 13.0),
            estimate("GCAM", Ssp::Ssp1, Rcp::Rcp19, 14.0),
            estimate("IMAGE", Ssp::Ssp5, Rcp::Baseline, 140.0),
        ];
        let pts = scatter_grid(&es);
        assert_eq!(pts.len(), 4);
        let first: Vec<(&str, f64)> = pts[..3]
            .iter()
            .map(|p| (p.model.as_str(), p.offset))
            .collect();
        assert_eq!(first[0].0, "AIM/CGE");
        assert_eq!(first[2].0, "WITCH-GLOBIOM");
        assert!(
            (first[0].1 + 0.1).abs() < 1e-15
                && first[1].1 == 0.0
                && (first[2].1 - 0.1).abs() < 1e-15
        );
        assert_eq!(
            (pts[3].ssp_ordinal, pts[3].rcp_ordinal, pts[3].offset),
            (5, 6, 0.0)
        );
    }

    #[test]
    fn crowded_cells_stay_within_bounds() {
        let es: Vec<_> = (0..12)
            .map(|i| estimate(&format!("M{i:02}"), Ssp::Ssp2, Rcp::Rcp45, 30.0))
            .collect();
        let pts = scatter_grid(&es);
        assert!(pts.iter().all(|p| p.offset.abs() <= 0.3 + 1e-12));
        assert!((pts[0].offset + 0.3).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig {
            bootstrap_samples: 999,
            ..RunConfig::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            start_year: 2060,
            ..RunConfig::default()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            u_max_override: Some(0.4),
            ..RunConfig::default()
        }
        .validate()
        .is_err());
    }
}
