use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // ingest
    #[error("missing required column `{0}`")]
    MissingHeader(String),
    #[error("unknown unit `{unit}` for variable `{variable}` (line {line})")]
    UnknownUnit {
        variable: String,
        unit: String,
        line: u64,
    },
    #[error("malformed number `{cell}` in column {column} (line {line})")]
    MalformedNumber {
        cell: String,
        column: String,
        line: u64,
    },
    #[error("no usable scenarios in input")]
    EmptyTable,
    #[error("csv: {0}")]
    Csv(String),
    #[error("start year {start_year} missing from grid of {scenario}")]
    StartYearMissing { scenario: String, start_year: i32 },
    #[error("{scenario}: only {found} grid points at or after {start_year} (need {required})")]
    TooFewPoints {
        scenario: String,
        start_year: i32,
        found: usize,
        required: usize,
    },
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    // intensity
    #[error("{scenario}: initial carbon intensity {sigma0} is not positive")]
    NonPositiveInitialIntensity { scenario: String, sigma0: f64 },
    #[error("empty scenario ensemble")]
    EmptyEnsemble,

    // speedfit
    #[error("{scenario}: {excluded} of {total} cumulative-emission points are ~0")]
    DegenerateCumulative {
        scenario: String,
        excluded: usize,
        total: usize,
    },
    #[error("u_max = {0} <= 0.5: carbon intensity never halves")]
    NeverHalves(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    // ensemble / lognormal
    #[error("need at least {required} values, got {found}")]
    TooFewValues { required: usize, found: usize },
    #[error("value {0} is not strictly positive")]
    NonPositiveValue(f64),
    #[error("x = {0} is not strictly positive")]
    NonPositiveX(f64),
    #[error("lognormal variance is zero")]
    ZeroVariance,

    #[error("io: {0}")]
    Io(String),
}

/// Coarse grouping of errors, used by the CLI for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Intensity,
    Fit,
    Statistics,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            MissingHeader(_)
            | UnknownUnit { .. }
            | MalformedNumber { .. }
            | EmptyTable
            | Csv(_)
            | StartYearMissing { .. }
            | TooFewPoints { .. }
            | InvalidSeries(_) => ErrorClass::Input,
            NonPositiveInitialIntensity { .. } | EmptyEnsemble => ErrorClass::Intensity,
            DegenerateCumulative { .. } | NeverHalves(_) | InvalidParameter(_) => ErrorClass::Fit,
            TooFewValues { .. } | NonPositiveValue(_) | NonPositiveX(_) | ZeroVariance => {
                ErrorClass::Statistics
            }
            Io(_) => ErrorClass::Io,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
