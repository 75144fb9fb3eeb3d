//! `decarb`: decarbonization-speed analysis of IAM scenario ensembles.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use decarb_core::report::{
    ensemble_stage, fit_stage, lognormal_stage, read_input, ReportWriter, REPORTED_STATISTICS,
};
use decarb_core::{
    bucket_counts, parse_scenario_csv, run_pipeline, Error, ErrorClass, OutputFormat, RunConfig,
};
use log::info;

#[derive(Parser)]
#[command(name = "decarb", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Validate and normalize the input table.
    Ingest,
    /// Fit θ per scenario and write the estimates table.
    Fit,
    /// Ensemble statistics with bootstrap intervals.
    Stats,
    /// Lognormal fit with parametric bootstrap intervals.
    Lognormal,
    /// Full pipeline, writing every output file.
    Report,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Options {
    /// Wide-format scenario CSV.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value = "World")]
    region: String,
    #[arg(long, global = true, default_value_t = 2010)]
    start_year: i32,
    /// Length of one θ time unit.
    #[arg(long, global = true, default_value_t = 5.0)]
    time_unit_years: f64,
    /// Use this u_max instead of the ensemble maximum.
    #[arg(long = "u-max", global = true)]
    u_max: Option<f64>,
    #[arg(long, global = true, env = "DECARB_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 5000)]
    bootstrap_samples: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, value_delimiter = ',', default_values_t = [Format::Json, Format::Csv])]
    format: Vec<Format>,
}

impl Options {
    fn run_config(&self) -> Result<RunConfig, Error> {
        let input_path = self
            .input
            .clone()
            .ok_or_else(|| Error::Io("--input <path> is required".into()))?;
        let formats: BTreeSet<OutputFormat> = self
            .format
            .iter()
            .map(|f| match f {
                Format::Json => OutputFormat::Json,
                Format::Csv => OutputFormat::Csv,
            })
            .collect();
        let config = RunConfig {
            input_path,
            region: self.region.clone(),
            start_year: self.start_year,
            time_unit_years: self.time_unit_years,
            u_max_override: self.u_max,
            seed: self.seed,
            bootstrap_samples: self.bootstrap_samples,
            output_dir: self.out.clone(),
            formats,
        };
        config.validate()?;
        Ok(config)
    }
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 10,
        ErrorClass::Intensity => 11,
        ErrorClass::Fit => 12,
        ErrorClass::Statistics => 13,
        ErrorClass::Io => 14,
    }
}

fn run(command: Command, config: &RunConfig) -> Result<(), Error> {
    if let Command::Report = command {
        let report = run_pipeline(config)?;
        println!(
            "{} scenarios fitted, {} warnings, u_max = {}; outputs in {}",
            report.fit.estimates.len(),
            report.fit.warnings.len(),
            report.fit.u_max.value,
            config.output_dir.display()
        );
        return Ok(());
    }

    let input = read_input(&config.input_path)?;
    let writer = ReportWriter::new(&config.output_dir, &config.formats)?;
    if let Command::Ingest = command {
        let parsed = parse_scenario_csv(input.as_slice(), &config.ingest_config())?;
        writer.table(&parsed.table, &config.region)?;
        writer.warnings(&parsed.warnings)?;
        println!(
            "{} scenarios accepted, {} warnings",
            parsed.table.len(),
            parsed.warnings.len()
        );
        return Ok(());
    }

    let fit = fit_stage(&input, config)?;
    let thetas = fit.thetas();
    let scale = config.halving_scale(fit.u_max.value);
    writer.warnings(&fit.warnings)?;
    match command {
        Command::Fit => {
            writer.estimates(&fit)?;
            writer.buckets(&bucket_counts(&fit.estimates))?;
            println!(
                "{} scenarios fitted, u_max = {}",
                thetas.len(),
                fit.u_max.value
            );
        }
        Command::Stats => {
            let report = ensemble_stage(&thetas, &scale, config)?;
            writer.ensemble(&report, &fit)?;
            for (stat, ci) in REPORTED_STATISTICS.iter().zip(&report.bootstrap) {
                println!("{stat}: {} [{}, {}]", ci.point, ci.lo, ci.hi);
            }
        }
        Command::Lognormal => {
            let report = lognormal_stage(&thetas, &scale, config)?;
            writer.lognormal(&report)?;
            println!("mu = {}, s2 = {}", report.fit.mu, report.fit.s2);
        }
        Command::Ingest | Command::Report => unreachable!(),
    }
    info!("outputs in {}", config.output_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match cli.options.run_config().and_then(|c| run(cli.command, &c)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(e.class()))
        }
    }
}
