use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("contradictory rule: conditions on feature {feature} have an empty intersection")]
    ContradictoryRule { feature: usize },
    #[error("vacuous rule: no condition remains after canonicalization")]
    VacuousRule,
    #[error("feature {feature} is tested both as an interval and as a category set")]
    MixedConditionKinds { feature: usize },
    #[error("invalid interval bound on feature {feature}: {reason}")]
    InvalidBound { feature: usize, reason: String },
    #[error("observation has no value for feature {feature}")]
    MissingFeature { feature: usize },
    #[error("feature {feature} has kind {found}, condition expects {expected}")]
    FeatureKindMismatch {
        feature: usize,
        expected: &'static str,
        found: &'static str,
    },
    #[error("feature index {feature} is out of range for {d} features")]
    FeatureOutOfRange { feature: usize, d: usize },
    #[error("feature {feature} is not a continuous feature of the quantile grid")]
    UnknownFeature { feature: usize },
    #[error("empty data")]
    EmptyData,
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {left} predictions vs {right} targets")]
    LengthMismatch { left: usize, right: usize },
    #[error("prediction kind does not match task {task}")]
    PredictionKind { task: &'static str },
    #[error("baseline risk is 0 while model risk is {model_risk}; predictivity undefined")]
    DegenerateBaseline { model_risk: f64 },
    #[error("invalid weights ({0}, {1}, {2}): need non-negative values summing to 1")]
    InvalidWeights(f64, f64, f64),
    #[error("simplicity needs at least two algorithms, got {0}")]
    FewerThanTwoAlgorithms(usize),
    #[error("every algorithm has an empty rule set; simplicity undefined")]
    AllEmpty,
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("bad fold count k={k} for n={n} rows (need 2 <= k <= n)")]
    BadK { n: usize, k: usize },
    #[error("dataset too small for a half split: n={0}, need at least 4")]
    TooSmall(usize),
    #[error("correlation needs at least two complete rows, got {0}")]
    InsufficientRows(usize),
    #[error("{path}: missing value at row {row}, column '{column}'")]
    MissingValues {
        path: PathBuf,
        row: usize,
        column: String,
    },
    #[error("{path}: column '{column}' named in {option} not found")]
    UnknownColumn {
        path: PathBuf,
        column: String,
        option: &'static str,
    },
    #[error("{path}: target column '{target}' not found")]
    UnknownTarget { path: PathBuf, target: String },
    #[error("{path}: parse error at row {row}, column {column}: {message}")]
    ParseError {
        path: PathBuf,
        row: usize,
        column: String,
        message: String,
    },
    #[error("{}schema error{}: {message}", .path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default(), .rule.map(|r| format!(" in rule {r}")).unwrap_or_default())]
    SchemaError {
        path: Option<PathBuf>,
        rule: Option<usize>,
        message: String,
    },
    #[error("{}rule {rule}: {source}", .path.as_ref().map(|p| format!("{}: ", p.display())).unwrap_or_default())]
    InvalidRule {
        path: Option<PathBuf>,
        rule: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("dataset schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by an inconsistent rule, as opposed to bad data or I/O.
    pub fn is_rule_error(&self) -> bool {
        matches!(
            self,
            Error::ContradictoryRule { .. }
                | Error::VacuousRule
                | Error::MixedConditionKinds { .. }
                | Error::InvalidBound { .. }
                | Error::InvalidRule { .. }
        )
    }
}
