//! Tabular data: typed feature columns, a target column and the task kind.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TaskKind {
    Regression,
    Classification,
}

impl TaskKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TaskKind::Regression => "regression",
            TaskKind::Classification => "classification",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A class label. Labels that parse as numbers order numerically and come
/// before non-numeric labels, which order lexicographically; this order
/// defines the "smallest class code" used for tie-breaking.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(String);

impl ClassLabel {
    pub fn new(label: impl Into<String>) -> Self {
        ClassLabel(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn numeric(&self) -> Option<f64> {
        self.0.trim().parse::<f64>().ok().filter(|v| !v.is_nan())
    }
}

impl Ord for ClassLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.numeric(), other.numeric()) {
            (Some(a), Some(b)) => a.total_cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for ClassLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassLabel {
    fn from(s: &str) -> Self {
        ClassLabel(s.to_string())
    }
}

/// A model output or a target value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Prediction {
    Real(f64),
    Class(ClassLabel),
}

impl Prediction {
    pub fn class(label: impl Into<String>) -> Self {
        Prediction::Class(ClassLabel::new(label))
    }

    pub fn task(&self) -> TaskKind {
        match self {
            Prediction::Real(_) => TaskKind::Regression,
            Prediction::Class(_) => TaskKind::Classification,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Prediction::Real(v) => Some(*v),
            Prediction::Class(_) => None,
        }
    }

    pub fn as_class(&self) -> Option<&ClassLabel> {
        match self {
            Prediction::Class(c) => Some(c),
            Prediction::Real(_) => None,
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prediction::Real(v) => write!(f, "{v}"),
            Prediction::Class(c) => write!(f, "{c}"),
        }
    }
}

/// Mean of a non-empty slice.
pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Most frequent label; ties go to the smallest label.
pub(crate) fn mode<'a, I>(labels: I) -> Option<ClassLabel>
where
    I: IntoIterator<Item = &'a ClassLabel>,
{
    let mut counts: BTreeMap<&ClassLabel, usize> = BTreeMap::new();
    for l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut best: Option<(&ClassLabel, usize)> = None;
    // BTreeMap iterates in ascending label order, so `>` keeps the smallest on ties.
    for (label, count) in counts {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((label, count));
        }
    }
    best.map(|(l, _)| l.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub enum FeatureKind {
    Continuous,
    /// Observed category levels, sorted.
    Categorical { levels: Vec<String> },
}

impl FeatureKind {
    pub fn name(&self) -> &'static str {
        match self {
            FeatureKind::Continuous => "continuous",
            FeatureKind::Categorical { .. } => "categorical",
        }
    }
}

/// Per-feature kinds of a dataset, indexed by feature position.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Schema {
    pub kinds: Vec<FeatureKind>,
}

impl Schema {
    pub fn new(kinds: Vec<FeatureKind>) -> Self {
        Schema { kinds }
    }

    pub fn all_continuous(d: usize) -> Self {
        Schema {
            kinds: vec![FeatureKind::Continuous; d],
        }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn get(&self, feature: usize) -> Option<&FeatureKind> {
        self.kinds.get(feature)
    }
}

/// Borrowed value of one feature of one observation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FeatureValue<'a> {
    Num(f64),
    Cat(&'a str),
}

impl FeatureValue<'_> {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FeatureValue::Num(_) => "continuous",
            FeatureValue::Cat(_) => "categorical",
        }
    }
}

/// Owned feature value, for observations built outside a [`Dataset`].
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(String),
}

pub trait Observation {
    fn value(&self, feature: usize) -> Option<FeatureValue<'_>>;
}

impl Observation for [Value] {
    fn value(&self, feature: usize) -> Option<FeatureValue<'_>> {
        self.get(feature).map(|v| match v {
            Value::Num(x) => FeatureValue::Num(*x),
            Value::Cat(s) => FeatureValue::Cat(s),
        })
    }
}

impl Observation for Vec<Value> {
    fn value(&self, feature: usize) -> Option<FeatureValue<'_>> {
        self.as_slice().value(feature)
    }
}

impl Observation for [f64] {
    fn value(&self, feature: usize) -> Option<FeatureValue<'_>> {
        self.get(feature).map(|v| FeatureValue::Num(*v))
    }
}

impl Observation for Vec<f64> {
    fn value(&self, feature: usize) -> Option<FeatureValue<'_>> {
        self.as_slice().value(feature)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ColumnData {
    Continuous(Vec<f64>),
    /// `codes[i]` indexes into the sorted `levels`.
    Categorical { codes: Vec<u32>, levels: Vec<String> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

impl Column {
    pub fn continuous(name: impl Into<String>, values: Vec<f64>) -> Self {
        Column {
            name: name.into(),
            data: ColumnData::Continuous(values),
        }
    }

    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, values: &[S]) -> Self {
        let mut levels: Vec<String> = values.iter().map(|v| v.as_ref().to_string()).collect();
        levels.sort();
        levels.dedup();
        let codes = values
            .iter()
            .map(|v| levels.binary_search_by(|l| l.as_str().cmp(v.as_ref())).unwrap() as u32)
            .collect();
        Column {
            name: name.into(),
            data: ColumnData::Categorical { codes, levels },
        }
    }

    pub fn len(&self) -> usize {
        match &self.data {
            ColumnData::Continuous(v) => v.len(),
            ColumnData::Categorical { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> FeatureKind {
        match &self.data {
            ColumnData::Continuous(_) => FeatureKind::Continuous,
            ColumnData::Categorical { levels, .. } => FeatureKind::Categorical {
                levels: levels.clone(),
            },
        }
    }

    pub fn value(&self, row: usize) -> FeatureValue<'_> {
        match &self.data {
            ColumnData::Continuous(v) => FeatureValue::Num(v[row]),
            ColumnData::Categorical { codes, levels } => {
                FeatureValue::Cat(&levels[codes[row] as usize])
            }
        }
    }

    pub fn as_continuous(&self) -> Option<&[f64]> {
        match &self.data {
            ColumnData::Continuous(v) => Some(v),
            ColumnData::Categorical { .. } => None,
        }
    }

    fn subset(&self, rows: &[usize]) -> Column {
        let data = match &self.data {
            ColumnData::Continuous(v) => ColumnData::Continuous(rows.iter().map(|&i| v[i]).collect()),
            ColumnData::Categorical { codes, levels } => ColumnData::Categorical {
                codes: rows.iter().map(|&i| codes[i]).collect(),
                levels: levels.clone(),
            },
        };
        Column {
            name: self.name.clone(),
            data,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Targets {
    Real(Vec<f64>),
    Class(Vec<ClassLabel>),
}

impl Targets {
    pub fn classes<S: AsRef<str>>(labels: &[S]) -> Self {
        Targets::Class(labels.iter().map(|l| ClassLabel::new(l.as_ref())).collect())
    }

    pub fn len(&self) -> usize {
        match self {
            Targets::Real(v) => v.len(),
            Targets::Class(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn task(&self) -> TaskKind {
        match self {
            Targets::Real(_) => TaskKind::Regression,
            Targets::Class(_) => TaskKind::Classification,
        }
    }

    pub fn get(&self, row: usize) -> Prediction {
        match self {
            Targets::Real(v) => Prediction::Real(v[row]),
            Targets::Class(v) => Prediction::Class(v[row].clone()),
        }
    }

    pub fn to_predictions(&self) -> Vec<Prediction> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    fn subset(&self, rows: &[usize]) -> Targets {
        match self {
            Targets::Real(v) => Targets::Real(rows.iter().map(|&i| v[i]).collect()),
            Targets::Class(v) => Targets::Class(rows.iter().map(|&i| v[i].clone()).collect()),
        }
    }
}

/// Column-typed table with a designated target. Validated at construction:
/// equal column lengths, finite continuous values, unique column names.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    name: String,
    features: Vec<Column>,
    target_name: String,
    targets: Targets,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: Vec<Column>,
        target_name: impl Into<String>,
        targets: Targets,
    ) -> Result<Self> {
        let target_name = target_name.into();
        let n = targets.len();
        for c in &features {
            if c.len() != n {
                return Err(Error::SchemaMismatch(format!(
                    "column '{}' has {} values, target has {n}",
                    c.name,
                    c.len()
                )));
            }
            if c.name == target_name {
                return Err(Error::SchemaMismatch(format!(
                    "target '{target_name}' is also listed as a feature"
                )));
            }
            if let ColumnData::Continuous(v) = &c.data {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::SchemaMismatch(format!(
                        "column '{}' holds a non-finite value",
                        c.name
                    )));
                }
            }
        }
        if let Targets::Real(v) = &targets {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::SchemaMismatch(format!(
                    "target '{target_name}' holds a non-finite value"
                )));
            }
        }
        let mut names: Vec<&str> = features.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::SchemaMismatch(format!("duplicate column '{}'", w[0])));
        }
        Ok(Dataset {
            name: name.into(),
            features,
            target_name,
            targets,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.targets.len()
    }

    pub fn d(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n() == 0
    }

    pub fn task(&self) -> TaskKind {
        self.targets.task()
    }

    pub fn features(&self) -> &[Column] {
        &self.features
    }

    pub fn feature(&self, f: usize) -> &Column {
        &self.features[f]
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn targets(&self) -> &Targets {
        &self.targets
    }

    pub fn schema(&self) -> Schema {
        Schema::new(self.features.iter().map(Column::kind).collect())
    }

    pub fn row(&self, index: usize) -> Row<'_> {
        Row { data: self, index }
    }

    pub fn rows(&self) -> impl Iterator<Item = Row<'_>> + '_ {
        (0..self.n()).map(move |i| self.row(i))
    }

    /// Rows selected by index, in the given order. Categorical levels are
    /// kept from the parent so that category domains stay comparable.
    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            features: self.features.iter().map(|c| c.subset(rows)).collect(),
            target_name: self.target_name.clone(),
            targets: self.targets.subset(rows),
        }
    }

    /// Same feature names, kinds and target kind.
    pub fn same_schema(&self, other: &Dataset) -> bool {
        self.task() == other.task()
            && self.d() == other.d()
            && self
                .features
                .iter()
                .zip(&other.features)
                .all(|(a, b)| a.name == b.name && a.kind().name() == b.kind().name())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Row<'a> {
    data: &'a Dataset,
    index: usize,
}

impl Row<'_> {
    pub fn index(&self) -> usize {
        self.index
    }
}

impl Observation for Row<'_> {
    fn value(&self, feature: usize) -> Option<FeatureValue<'_>> {
        self.data.features.get(feature).map(|c| c.value(self.index))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_labels_order_numbers_first() {
        let mut v: Vec<ClassLabel> = ["b", "10", "9", "a", "2.5"].iter().map(|s| (*s).into()).collect();
        v.sort();
        let s: Vec<&str> = v.iter().map(|l| l.as_str()).collect();
        assert_eq!(s, ["2.5", "9", "10", "a", "b"]);
    }

    #[test]
    fn mode_breaks_ties_toward_smallest_label() {
        let labels: Vec<ClassLabel> = ["b", "a", "b", "a"].iter().map(|s| (*s).into()).collect();
        assert_eq!(mode(&labels).unwrap().as_str(), "a");
        let labels: Vec<ClassLabel> = ["b", "a", "b"].iter().map(|s| (*s).into()).collect();
        assert_eq!(mode(&labels).unwrap().as_str(), "b");
    }

    #[test]
    fn subset_keeps_category_levels() {
        let d = Dataset::new(
            "t",
            vec![Column::categorical("c", &["x", "y", "z"])],
            "y",
            Targets::Real(vec![1.0, 2.0, 3.0]),
        )
        .unwrap();
        let s = d.subset(&[2]);
        assert_eq!(s.n(), 1);
        assert_eq!(s.row(0).value(0), Some(FeatureValue::Cat("z")));
        assert_eq!(s.schema(), d.schema());
    }

    #[test]
    fn rejects_ragged_columns() {
        let err = Dataset::new(
            "t",
            vec![Column::continuous("a", vec![1.0])],
            "y",
            Targets::Real(vec![1.0, 2.0]),
        );
        assert!(matches!(err, Err(Error::SchemaMismatch(_))));
    }
}
