//! Wide-format scenario CSV ingestion.
//!
//! Input files follow the layout of the public SSP database exports: one row
//! per `(MODEL, SCENARIO, REGION, VARIABLE)` and one column per reported
//! year. Only the two variables needed for carbon intensity are retained.
//! Scenarios that cannot be used are dropped with an [`IngestWarning`]; only
//! structural problems with the file itself are hard errors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

pub const EMISSIONS_VARIABLE: &str = "Emissions|CO2|Fossil Fuels and Industry";
pub const ENERGY_VARIABLE: &str = "Primary Energy";
pub const EMISSIONS_UNITS: [&str; 2] = ["Mt CO2/yr", "MtCO2/yr"];
pub const ENERGY_UNIT: &str = "EJ/yr";

pub const FIRST_YEAR: i32 = 2005;
pub const LAST_YEAR: i32 = 2100;
/// Minimum number of grid points kept after alignment to the start year.
pub const MIN_GRID_POINTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ssp {
    Ssp1,
    Ssp2,
    Ssp3,
    Ssp4,
    Ssp5,
}

impl Ssp {
    pub const ALL: [Ssp; 5] = [Ssp::Ssp1, Ssp::Ssp2, Ssp::Ssp3, Ssp::Ssp4, Ssp::Ssp5];

    /// 1-based ordinal.
    pub fn ordinal(self) -> u8 {
        self as u8 + 1
    }

    fn from_digit(d: u8) -> Option<Self> {
        Self::ALL.get(usize::from(d).checked_sub(1)?).copied()
    }
}

impl fmt::Display for Ssp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SSP{}", self.ordinal())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rcp {
    Rcp19,
    Rcp26,
    Rcp34,
    Rcp45,
    Rcp60,
    Baseline,
}

impl Rcp {
    pub const ALL: [Rcp; 6] = [
        Rcp::Rcp19,
        Rcp::Rcp26,
        Rcp::Rcp34,
        Rcp::Rcp45,
        Rcp::Rcp60,
        Rcp::Baseline,
    ];

    /// 1-based ordinal in order of increasing forcing, Baseline last.
    pub fn ordinal(self) -> u8 {
        self as u8 + 1
    }

    /// Token used in scenario names (`19`, `26`, ..., `Baseline`).
    pub fn token(self) -> &'static str {
        match self {
            Rcp::Rcp19 => "19",
            Rcp::Rcp26 => "26",
            Rcp::Rcp34 => "34",
            Rcp::Rcp45 => "45",
            Rcp::Rcp60 => "60",
            Rcp::Baseline => "Baseline",
        }
    }

    fn from_token(token: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.token().eq_ignore_ascii_case(token))
    }
}

impl fmt::Display for Rcp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rcp::Baseline => f.write_str("Baseline"),
            r => write!(f, "RCP{}", r.token()),
        }
    }
}

/// Identity of one scenario: the modelling team plus its SSP and RCP.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScenarioKey {
    pub model: String,
    pub ssp: Ssp,
    pub rcp: Rcp,
    /// Scenario name as it appeared in the input, e.g. `SSP1-19`.
    pub raw_name: String,
}

impl ScenarioKey {
    pub fn new(model: impl Into<String>, ssp: Ssp, rcp: Rcp) -> Self {
        let raw_name = format!("{}-{}", ssp, rcp.token());
        ScenarioKey {
            model: model.into(),
            ssp,
            rcp,
            raw_name,
        }
    }

    /// Parses `SSPx-yy` or `SSPx-Baseline` (case-insensitive, whitespace
    /// around the tokens is ignored).
    pub fn parse(model: &str, raw_name: &str) -> Option<Self> {
        let (ssp_tok, rcp_tok) = raw_name.split_once('-')?;
        let ssp_tok = ssp_tok.trim();
        if ssp_tok.len() != 4 || !ssp_tok[..3].eq_ignore_ascii_case("ssp") {
            return None;
        }
        let digit = ssp_tok[3..].parse::<u8>().ok()?;
        let ssp = Ssp::from_digit(digit)?;
        let rcp = Rcp::from_token(rcp_tok.trim())?;
        Some(ScenarioKey {
            model: model.to_string(),
            ssp,
            rcp,
            raw_name: raw_name.to_string(),
        })
    }

    /// `(model, ssp, rcp)`, the uniqueness key within a table.
    pub fn identity(&self) -> (&str, Ssp, Rcp) {
        (&self.model, self.ssp, self.rcp)
    }
}

impl fmt::Display for ScenarioKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.model, self.raw_name)
    }
}

/// Values reported on a strictly ascending year grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualSeries {
    years: Vec<i32>,
    values: Vec<f64>,
    unit: String,
}

impl AnnualSeries {
    pub fn new(years: Vec<i32>, values: Vec<f64>, unit: impl Into<String>) -> Result<Self> {
        if years.len() != values.len() {
            return Err(Error::InvalidSeries(format!(
                "{} years but {} values",
                years.len(),
                values.len()
            )));
        }
        if years.len() < 2 {
            return Err(Error::InvalidSeries("fewer than two points".into()));
        }
        if years.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSeries("years not strictly ascending".into()));
        }
        if years.iter().any(|y| !(FIRST_YEAR..=LAST_YEAR).contains(y)) {
            return Err(Error::InvalidSeries(format!(
                "years outside [{FIRST_YEAR}, {LAST_YEAR}]"
            )));
        }
        Ok(AnnualSeries {
            years,
            values,
            unit: unit.into(),
        })
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn len(&self) -> usize {
        self.years.len()
    }

    pub fn is_empty(&self) -> bool {
        self.years.is_empty()
    }

    pub fn value_at(&self, year: i32) -> Option<f64> {
        self.years.binary_search(&year).ok().map(|i| self.values[i])
    }

    fn tail_from(&self, index: usize) -> AnnualSeries {
        AnnualSeries {
            years: self.years[index..].to_vec(),
            values: self.values[index..].to_vec(),
            unit: self.unit.clone(),
        }
    }
}

/// One scenario's fossil/industry CO2 emissions and primary energy on a
/// shared year grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub key: ScenarioKey,
    emissions_ffi: AnnualSeries,
    primary_energy: AnnualSeries,
}

impl ScenarioRecord {
    /// Builds a record, checking the shared grid, positive energy and the
    /// presence of `start_year`.
    pub fn new(
        key: ScenarioKey,
        emissions_ffi: AnnualSeries,
        primary_energy: AnnualSeries,
        start_year: i32,
    ) -> Result<Self> {
        if emissions_ffi.years != primary_energy.years {
            return Err(Error::InvalidSeries(format!(
                "{key}: emissions and energy grids differ"
            )));
        }
        if let Some(v) = primary_energy.values.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidSeries(format!(
                "{key}: primary energy {v} is not positive"
            )));
        }
        if emissions_ffi.value_at(start_year).is_none() {
            return Err(Error::StartYearMissing {
                scenario: key.to_string(),
                start_year,
            });
        }
        Ok(ScenarioRecord {
            key,
            emissions_ffi,
            primary_energy,
        })
    }

    pub fn years(&self) -> &[i32] {
        self.emissions_ffi.years()
    }

    /// Mt CO2/yr.
    pub fn emissions(&self) -> &AnnualSeries {
        &self.emissions_ffi
    }

    /// EJ/yr.
    pub fn primary_energy(&self) -> &AnnualSeries {
        &self.primary_energy
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestConfig {
    pub region: String,
    pub start_year: i32,
    pub emissions_variable: String,
    pub energy_variable: String,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            region: "World".to_string(),
            start_year: 2010,
            emissions_variable: EMISSIONS_VARIABLE.to_string(),
            energy_variable: ENERGY_VARIABLE.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IngestWarning {
    pub model: String,
    pub scenario: String,
    pub reason: String,
    /// Whether the scenario was excluded from the table.
    pub dropped: bool,
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = if self.dropped { "dropped" } else { "kept" };
        write!(
            f,
            "{}/{} ({action}): {}",
            self.model, self.scenario, self.reason
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScenarioTable {
    pub records: Vec<ScenarioRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTable {
    pub table: ScenarioTable,
    pub warnings: Vec<IngestWarning>,
}

#[derive(Default)]
struct Pending {
    emissions: Option<Vec<(i32, f64)>>,
    energy: Option<Vec<(i32, f64)>>,
    duplicate: bool,
}

enum Which {
    Emissions,
    Energy,
}

fn find_column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::MissingHeader(name.to_string()))
}

/// Parses a wide-format scenario CSV into a [`ScenarioTable`].
pub fn parse_scenario_csv<R: Read>(input: R, config: &IngestConfig) -> Result<ParsedTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let model_col = find_column(&headers, "MODEL")?;
    let scenario_col = find_column(&headers, "SCENARIO")?;
    let region_col = find_column(&headers, "REGION")?;
    let variable_col = find_column(&headers, "VARIABLE")?;
    let unit_col = find_column(&headers, "UNIT")?;
    let year_cols: Vec<(usize, i32)> = headers
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.trim().parse::<i32>().ok().map(|y| (i, y)))
        .collect();

    let mut pending: BTreeMap<(String, String), Pending> = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        if !field(region_col).eq_ignore_ascii_case(config.region.trim()) {
            continue;
        }
        let variable = field(variable_col);
        let unit = field(unit_col);
        let which = if variable.eq_ignore_ascii_case(config.emissions_variable.trim()) {
            if !EMISSIONS_UNITS.contains(&unit) {
                return Err(Error::UnknownUnit {
                    variable: variable.to_string(),
                    unit: unit.to_string(),
                    line,
                });
            }
            Which::Emissions
        } else if variable.eq_ignore_ascii_case(config.energy_variable.trim()) {
            if unit != ENERGY_UNIT {
                return Err(Error::UnknownUnit {
                    variable: variable.to_string(),
                    unit: unit.to_string(),
                    line,
                });
            }
            Which::Energy
        } else {
            continue;
        };

        let mut points = Vec::with_capacity(year_cols.len());
        for &(col, year) in &year_cols {
            let cell = field(col);
            if cell.is_empty() {
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => points.push((year, v)),
                _ => {
                    return Err(Error::MalformedNumber {
                        cell: cell.to_string(),
                        column: headers[col].to_string(),
                        line,
                    })
                }
            }
        }
        points.sort_by_key(|p| p.0);

        let entry = pending
            .entry((
                field(model_col).to_string(),
                field(scenario_col).to_string(),
            ))
            .or_default();
        let slot = match which {
            Which::Emissions => &mut entry.emissions,
            Which::Energy => &mut entry.energy,
        };
        if slot.is_some() {
            entry.duplicate = true;
        } else {
            *slot = Some(points);
        }
    }

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = BTreeSet::new();
    for ((model, scenario), entry) in pending {
        let mut warn = |reason: String, dropped: bool| {
            warnings.push(IngestWarning {
                model: model.clone(),
                scenario: scenario.clone(),
                reason,
                dropped,
            })
        };
        let Some(key) = ScenarioKey::parse(&model, &scenario) else {
            warn("unrecognized scenario name".into(), true);
            continue;
        };
        if entry.duplicate {
            warn("duplicate rows for a required variable".into(), true);
            continue;
        }
        let (emissions, energy) = match (entry.emissions, entry.energy) {
            (Some(e), Some(p)) => (e, p),
            (None, _) => {
                warn(format!("missing `{}`", config.emissions_variable), true);
                continue;
            }
            (_, None) => {
                warn(format!("missing `{}`", config.energy_variable), true);
                continue;
            }
        };
        match build_record(key, &emissions, &energy, config.start_year) {
            Ok((record, trimmed)) => {
                if !seen.insert((record.key.model.clone(), record.key.ssp, record.key.rcp)) {
                    warn("duplicate (model, SSP, RCP) combination".into(), true);
                    continue;
                }
                if !trimmed.is_empty() {
                    warn(
                        format!("years not shared by both variables dropped: {trimmed:?}"),
                        false,
                    );
                }
                records.push(record);
            }
            Err(reason) => warn(reason, true),
        }
    }

    if records.is_empty() {
        return Err(Error::EmptyTable);
    }
    warnings.sort();
    Ok(ParsedTable {
        table: ScenarioTable { records },
        warnings,
    })
}

/// Intersects both variables onto a common grid inside the supported year
/// range. Returns the record plus the years that were discarded.
fn build_record(
    key: ScenarioKey,
    emissions: &[(i32, f64)],
    energy: &[(i32, f64)],
    start_year: i32,
) -> std::result::Result<(ScenarioRecord, Vec<i32>), String> {
    let in_range = |y: &i32| (FIRST_YEAR..=LAST_YEAR).contains(y);
    let energy_map: BTreeMap<i32, f64> = energy.iter().copied().collect();
    let emissions_years: BTreeSet<i32> = emissions.iter().map(|p| p.0).collect();

    let mut years = Vec::new();
    let mut e_vals = Vec::new();
    let mut p_vals = Vec::new();
    for &(year, e) in emissions {
        if let (true, Some(&p)) = (in_range(&year), energy_map.get(&year)) {
            years.push(year);
            e_vals.push(e);
            p_vals.push(p);
        }
    }
    let kept: BTreeSet<i32> = years.iter().copied().collect();
    let trimmed: Vec<i32> = emissions_years
        .into_iter()
        .chain(energy_map.keys().copied())
        .collect::<BTreeSet<_>>()
        .difference(&kept)
        .copied()
        .collect();

    if years.len() < 2 {
        return Err(format!("only {} shared year(s)", years.len()));
    }
    if !years.contains(&start_year) {
        return Err(format!("no data for start year {start_year}"));
    }
    if let Some((y, v)) = years.iter().zip(&p_vals).find(|(_, v)| !(**v > 0.0)) {
        return Err(format!("primary energy {v} at {y} is not positive"));
    }
    let emissions =
        AnnualSeries::new(years.clone(), e_vals, EMISSIONS_UNITS[0]).map_err(|e| e.to_string())?;
    let energy = AnnualSeries::new(years, p_vals, ENERGY_UNIT).map_err(|e| e.to_string())?;
    let record =
        ScenarioRecord::new(key, emissions, energy, start_year).map_err(|e| e.to_string())?;
    Ok((record, trimmed))
}

/// Drops grid points before `start_year`, requiring at least
/// [`MIN_GRID_POINTS`] to remain.
pub fn align_to_start_year(record: &ScenarioRecord, start_year: i32) -> Result<ScenarioRecord> {
    align_to_start_year_with(record, start_year, MIN_GRID_POINTS)
}

pub fn align_to_start_year_with(
    record: &ScenarioRecord,
    start_year: i32,
    min_points: usize,
) -> Result<ScenarioRecord> {
    let index = record
        .years()
        .binary_search(&start_year)
        .map_err(|_| Error::StartYearMissing {
            scenario: record.key.to_string(),
            start_year,
        })?;
    let remaining = record.years().len() - index;
    if remaining < min_points.max(2) {
        return Err(Error::TooFewPoints {
            scenario: record.key.to_string(),
            start_year,
            found: remaining,
            required: min_points,
        });
    }
    Ok(ScenarioRecord {
        key: record.key.clone(),
        emissions_ffi: record.emissions_ffi.tail_from(index),
        primary_energy: record.primary_energy.tail_from(index),
    })
}

impl ScenarioTable {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes the table back out in the wide input layout. Years are the
    /// union over all records; cells outside a record's grid stay empty.
    pub fn write_csv<W: std::io::Write>(&self, out: W, region: &str) -> Result<()> {
        let years: BTreeSet<i32> = self
            .records
            .iter()
            .flat_map(|r| r.years().iter().copied())
            .collect();
        let mut writer = csv::Writer::from_writer(out);
        let mut header = vec![
            "MODEL".to_string(),
            "SCENARIO".into(),
            "REGION".into(),
            "VARIABLE".into(),
            "UNIT".into(),
        ];
        header.extend(years.iter().map(|y| y.to_string()));
        writer.write_record(&header)?;
        for record in &self.records {
            for (variable, series) in [
                (EMISSIONS_VARIABLE, &record.emissions_ffi),
                (ENERGY_VARIABLE, &record.primary_energy),
            ] {
                let mut row = vec![
                    record.key.model.clone(),
                    record.key.raw_name.clone(),
                    region.to_string(),
                    variable.to_string(),
                    series.unit.clone(),
                ];
                row.extend(years.iter().map(|y| {
                    series
                        .value_at(*y)
                        .map_or_else(String::new, |v| v.to_string())
                }));
                writer.write_record(&row)?;
            }
        }
        writer.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let scenarios: Vec<Value> = self
            .records
            .iter()
            .map(|r| {
                json!({
                    "model": r.key.model,
                    "scenario": r.key.raw_name,
                    "ssp": r.key.ssp.to_string(),
                    "rcp": r.key.rcp.to_string(),
                    "years": r.years(),
                    "emissions_mtco2": r.emissions_ffi.values(),
                    "primary_energy_ej": r.primary_energy.values(),
                })
            })
            .collect();
        json!({ "scenarios": scenarios })
    }
}
