//! Decarbonization speed of climate-mitigation scenarios.
//!
//! The pipeline reads wide-format scenario tables, computes each scenario's
//! carbon-intensity and decarbonization-rate paths, fits a single speed θ
//! per scenario by matching cumulative emissions, and summarises the
//! resulting ensemble empirically (with bootstrap intervals) and through a
//! fitted lognormal distribution.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod ingest;
pub mod intensity;
pub mod lognormal;
pub mod minimize;
pub mod output;
pub mod report;
pub mod resample;
pub mod speedfit;

pub use ensemble::{
    bootstrap_ci, halving_time_table, histogram, summary_stats, BootstrapResult, EnsembleSummary,
    HalvingScale, Histogram, Statistic,
};
pub use error::{Error, ErrorClass, Result};
pub use ingest::{
    align_to_start_year, parse_scenario_csv, AnnualSeries, IngestConfig, IngestWarning, Rcp,
    ScenarioKey, ScenarioRecord, ScenarioTable, Ssp,
};
pub use intensity::{carbon_intensity, decarb_rate, global_u_max, IntensityPath, RatePath, UMax};
pub use lognormal::{
    lognormal_mle, lognormal_pdf, lognormal_stats, parametric_bootstrap, LognormalFit,
    LognormalStats,
};
pub use report::{
    analyze, bucket_counts, run_pipeline, scatter_grid, OutputFormat, RunConfig, RunReport,
    ScatterDatum,
};
pub use speedfit::{
    ambition_bucket, cumulative_emissions, fit_all, fit_objective, fit_theta, halving_time,
    reconstruct_emissions, reconstruct_rate, synthesize_scenario, AmbitionBucket, FitConfig,
    RateModel, ThetaEstimate,
};
