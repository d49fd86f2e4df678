//! Rule-set JSON interchange format.
//!
//! ```json
//! {"task": "regression", "default_prediction": 1.5,
//!  "rules": [{"conditions": [{"feature": 0, "kind": "interval",
//!                             "lower": null, "upper": 3.0, "categories": null}],
//!             "prediction": 2.0}]}
//! ```
//!
//! A `null` lower (upper) bound stands for minus (plus) infinity.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use super::{canonicalize, Condition, Rule, RuleSet, Test};
use crate::data::{Prediction, TaskKind};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindDoc {
    Interval,
    MemberOf,
}

#[derive(Serialize, Deserialize)]
struct ConditionDoc {
    feature: usize,
    kind: KindDoc,
    #[serde(default)]
    lower: Option<f64>,
    #[serde(default)]
    upper: Option<f64>,
    #[serde(default)]
    categories: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    conditions: Vec<ConditionDoc>,
    prediction: Json,
}

#[derive(Serialize)]
struct RuleSetDoc<'a> {
    task: TaskKind,
    default_prediction: Json,
    rules: &'a [RuleDoc],
}

fn prediction_to_json(p: &Prediction) -> Json {
    match p {
        Prediction::Real(v) => Json::from(*v),
        Prediction::Class(c) => Json::from(c.as_str()),
    }
}

fn prediction_from_json(v: &Json, task: TaskKind) -> std::result::Result<Prediction, String> {
    match (task, v) {
        (TaskKind::Regression, Json::Number(n)) => n
            .as_f64()
            .map(Prediction::Real)
            .ok_or_else(|| format!("prediction {n} is not representable as f64")),
        (TaskKind::Classification, Json::String(s)) => Ok(Prediction::class(s.as_str())),
        (TaskKind::Classification, Json::Number(n)) => Ok(Prediction::class(n.to_string())),
        (task, other) => Err(format!("prediction {other} is not valid for a {task} task")),
    }
}

fn condition_to_doc(c: &Condition) -> ConditionDoc {
    match &c.test {
        Test::Interval { lower, upper } => ConditionDoc {
            feature: c.feature,
            kind: KindDoc::Interval,
            lower: lower.is_finite().then_some(*lower),
            upper: upper.is_finite().then_some(*upper),
            categories: None,
        },
        Test::MemberOf(set) => ConditionDoc {
            feature: c.feature,
            kind: KindDoc::MemberOf,
            lower: None,
            upper: None,
            categories: Some(set.iter().cloned().collect()),
        },
    }
}

fn condition_from_doc(doc: ConditionDoc) -> std::result::Result<Condition, String> {
    let test = match doc.kind {
        KindDoc::Interval => {
            if doc.categories.is_some() {
                return Err("interval condition must not carry categories".into());
            }
            Test::Interval {
                lower: doc.lower.unwrap_or(f64::NEG_INFINITY),
                upper: doc.upper.unwrap_or(f64::INFINITY),
            }
        }
        KindDoc::MemberOf => {
            if doc.lower.is_some() || doc.upper.is_some() {
                return Err("member_of condition must not carry bounds".into());
            }
            match doc.categories {
                Some(c) if !c.is_empty() => Test::MemberOf(c.into_iter().collect()),
                _ => return Err("member_of condition needs a non-empty categories array".into()),
            }
        }
    };
    Ok(Condition::new(doc.feature, test))
}

/// Serialize a rule set; key order is fixed.
pub fn export_rules(rs: &RuleSet) -> String {
    let rules: Vec<RuleDoc> = rs
        .rules
        .iter()
        .map(|r| RuleDoc {
            conditions: r.conditions.iter().map(condition_to_doc).collect(),
            prediction: prediction_to_json(&r.prediction),
        })
        .collect();
    let doc = RuleSetDoc {
        task: rs.task,
        default_prediction: prediction_to_json(&rs.default_prediction),
        rules: &rules,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("rule set serializes");
    s.push('\n');
    s
}

pub fn write_rules(rs: &RuleSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, export_rules(rs)).map_err(|e| Error::io(path, e))
}

/// Parse and canonicalize a rule set from JSON text.
pub fn parse_rules(text: &str) -> Result<RuleSet> {
    parse_with_origin(text, None)
}

/// Read, parse and canonicalize a rule-set file.
pub fn read_rules(path: impl AsRef<Path>) -> Result<RuleSet> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_with_origin(&text, Some(path))
}

fn parse_with_origin(text: &str, origin: Option<&Path>) -> Result<RuleSet> {
    let path: Option<PathBuf> = origin.map(Path::to_path_buf);
    let schema_err = |rule: Option<usize>, message: String| Error::SchemaError {
        path: path.clone(),
        rule,
        message,
    };

    let root: Json =
        serde_json::from_str(text).map_err(|e| schema_err(None, format!("invalid JSON: {e}")))?;
    let obj = root
        .as_object()
        .ok_or_else(|| schema_err(None, "top level must be an object".into()))?;
    let field = |name: &str| {
        obj.get(name)
            .ok_or_else(|| schema_err(None, format!("missing field `{name}`")))
    };

    let task: TaskKind = serde_json::from_value(field("task")?.clone())
        .map_err(|e| schema_err(None, format!("field `task`: {e}")))?;
    let default_prediction = prediction_from_json(field("default_prediction")?, task)
        .map_err(|m| schema_err(None, format!("field `default_prediction`: {m}")))?;
    let raw_rules = field("rules")?
        .as_array()
        .ok_or_else(|| schema_err(None, "field `rules` must be an array".into()))?;

    let mut rules = Vec::with_capacity(raw_rules.len());
    for (i, raw) in raw_rules.iter().enumerate() {
        let doc: RuleDoc =
            serde_json::from_value(raw.clone()).map_err(|e| schema_err(Some(i), e.to_string()))?;
        let prediction =
            prediction_from_json(&doc.prediction, task).map_err(|m| schema_err(Some(i), m))?;
        let conditions = doc
            .conditions
            .into_iter()
            .map(condition_from_doc)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| schema_err(Some(i), m))?;
        let rule = canonicalize(&Rule::new(conditions, prediction)).map_err(|e| Error::InvalidRule {
            path: path.clone(),
            rule: i,
            source: Box::new(e),
        })?;
        rules.push(rule);
    }
    RuleSet::new(task, rules, default_prediction)
}
