//! Rule representation: conditions, rules, rule sets, canonical form and
//! the interpretability index.

mod json;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};

pub use json::{export_rules, parse_rules, read_rules, write_rules};

use crate::data::{FeatureKind, FeatureValue, Observation, Prediction, Schema, TaskKind};
use crate::error::{Error, Result};
use crate::learners::tree::{DecisionTree, NodeKind, Split};

/// A single-feature test.
///
/// Intervals are half-open, `lower < x <= upper`, with infinite ends allowed.
#[derive(Clone, Debug)]
pub enum Test {
    Interval { lower: f64, upper: f64 },
    MemberOf(BTreeSet<String>),
}

impl Test {
    pub fn interval(lower: f64, upper: f64) -> Self {
        Test::Interval { lower, upper }
    }

    pub fn at_most(upper: f64) -> Self {
        Test::Interval {
            lower: f64::NEG_INFINITY,
            upper,
        }
    }

    pub fn greater_than(lower: f64) -> Self {
        Test::Interval {
            lower,
            upper: f64::INFINITY,
        }
    }

    pub fn member_of<S: AsRef<str>>(categories: &[S]) -> Self {
        Test::MemberOf(categories.iter().map(|c| c.as_ref().to_string()).collect())
    }

    fn kind_name(&self) -> &'static str {
        match self {
            Test::Interval { .. } => "continuous",
            Test::MemberOf(_) => "categorical",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Test::Interval { .. } => 0,
            Test::MemberOf(_) => 1,
        }
    }
}

impl PartialEq for Test {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Test {}

impl Ord for Test {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (
                Test::Interval { lower: a, upper: b },
                Test::Interval { lower: c, upper: d },
            ) => a.total_cmp(c).then_with(|| b.total_cmp(d)),
            (Test::MemberOf(a), Test::MemberOf(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Test {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Test {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Test::Interval { lower, upper } => {
                0u8.hash(state);
                lower.to_bits().hash(state);
                upper.to_bits().hash(state);
            }
            Test::MemberOf(set) => {
                1u8.hash(state);
                set.hash(state);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition {
    pub feature: usize,
    pub test: Test,
}

impl Condition {
    pub fn new(feature: usize, test: Test) -> Self {
        Condition { feature, test }
    }

    pub fn holds<O: Observation + ?Sized>(&self, x: &O) -> Result<bool> {
        let value = x
            .value(self.feature)
            .ok_or(Error::MissingFeature { feature: self.feature })?;
        match (&self.test, value) {
            (Test::Interval { lower, upper }, FeatureValue::Num(v)) => Ok(*lower < v && v <= *upper),
            (Test::MemberOf(set), FeatureValue::Cat(c)) => Ok(set.contains(c)),
            (test, value) => Err(Error::FeatureKindMismatch {
                feature: self.feature,
                expected: test.kind_name(),
                found: value.kind_name(),
            }),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.test {
            Test::Interval { lower, upper } if lower.is_infinite() => {
                write!(f, "X{} <= {upper}", self.feature)
            }
            Test::Interval { lower, upper } if upper.is_infinite() => {
                write!(f, "X{} > {lower}", self.feature)
            }
            Test::Interval { lower, upper } => write!(f, "{lower} < X{} <= {upper}", self.feature),
            Test::MemberOf(set) => {
                let cats: Vec<&str> = set.iter().map(String::as_str).collect();
                write!(f, "X{} in {{{}}}", self.feature, cats.join(", "))
            }
        }
    }
}

/// If-Then rule: a conjunction of conditions and a constant prediction.
///
/// Equality (`==`) compares conditions and prediction. Rule identity for
/// stability purposes ignores the prediction; see [`Rule::same_conditions`].
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub prediction: Prediction,
}

impl Rule {
    pub fn new(conditions: Vec<Condition>, prediction: Prediction) -> Self {
        Rule {
            conditions,
            prediction,
        }
    }

    /// Number of conditions. Meaningful on canonical rules.
    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn same_conditions(&self, other: &Rule) -> bool {
        self.conditions == other.conditions
    }

    pub fn is_activated<O: Observation + ?Sized>(&self, x: &O) -> Result<bool> {
        for c in &self.conditions {
            if !c.holds(x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let conds: Vec<String> = self.conditions.iter().map(|c| c.to_string()).collect();
        write!(f, "IF {} THEN {}", conds.join(" AND "), self.prediction)
    }
}

/// Merge conditions per feature, drop vacuous ones and sort by feature.
pub fn canonicalize(rule: &Rule) -> Result<Rule> {
    canonicalize_impl(rule, None)
}

/// Like [`canonicalize`], also checking feature kinds against `schema` and
/// dropping category sets that cover every observed level.
pub fn canonicalize_in(rule: &Rule, schema: &Schema) -> Result<Rule> {
    canonicalize_impl(rule, Some(schema))
}

fn canonicalize_impl(rule: &Rule, schema: Option<&Schema>) -> Result<Rule> {
    let mut merged: BTreeMap<usize, Test> = BTreeMap::new();
    for c in &rule.conditions {
        let feature = c.feature;
        let test = normalized(c)?;
        let test = match merged.remove(&feature) {
            None => test,
            Some(prev) => intersect(feature, prev, test)?,
        };
        merged.insert(feature, test);
    }

    let mut conditions = Vec::with_capacity(merged.len());
    for (feature, test) in merged {
        let test = match schema {
            None => Some(test),
            Some(s) => restrict_to_schema(feature, test, s)?,
        };
        match test {
            Some(Test::Interval { lower, upper }) if lower == f64::NEG_INFINITY && upper == f64::INFINITY => {}
            Some(test) => conditions.push(Condition { feature, test }),
            None => {}
        }
    }
    if conditions.is_empty() {
        return Err(Error::VacuousRule);
    }
    Ok(Rule {
        conditions,
        prediction: rule.prediction.clone(),
    })
}

fn normalized(c: &Condition) -> Result<Test> {
    let feature = c.feature;
    match &c.test {
        Test::Interval { lower, upper } => {
            if lower.is_nan() || upper.is_nan() {
                return Err(Error::InvalidBound {
                    feature,
                    reason: "NaN bound".into(),
                });
            }
            if *lower == f64::INFINITY || *upper == f64::NEG_INFINITY || lower >= upper {
                return Err(Error::ContradictoryRule { feature });
            }
            // -0.0 and 0.0 must compare and hash identically.
            Ok(Test::Interval {
                lower: *lower + 0.0,
                upper: *upper + 0.0,
            })
        }
        Test::MemberOf(set) if set.is_empty() => Err(Error::ContradictoryRule { feature }),
        Test::MemberOf(set) => Ok(Test::MemberOf(set.clone())),
    }
}

fn intersect(feature: usize, a: Test, b: Test) -> Result<Test> {
    match (a, b) {
        (
            Test::Interval { lower: l1, upper: u1 },
            Test::Interval { lower: l2, upper: u2 },
        ) => {
            let lower = l1.max(l2);
            let upper = u1.min(u2);
            if lower >= upper {
                Err(Error::ContradictoryRule { feature })
            } else {
                Ok(Test::Interval { lower, upper })
            }
        }
        (Test::MemberOf(a), Test::MemberOf(b)) => {
            let set: BTreeSet<String> = a.intersection(&b).cloned().collect();
            if set.is_empty() {
                Err(Error::ContradictoryRule { feature })
            } else {
                Ok(Test::MemberOf(set))
            }
        }
        _ => Err(Error::MixedConditionKinds { feature }),
    }
}

fn restrict_to_schema(feature: usize, test: Test, schema: &Schema) -> Result<Option<Test>> {
    let kind = schema.get(feature).ok_or(Error::FeatureOutOfRange {
        feature,
        d: schema.len(),
    })?;
    match (kind, test) {
        (FeatureKind::Continuous, t @ Test::Interval { .. }) => Ok(Some(t)),
        (FeatureKind::Categorical { levels }, Test::MemberOf(set)) => {
            let known: BTreeSet<String> = set
                .into_iter()
                .filter(|c| levels.binary_search(c).is_ok())
                .collect();
            if known.is_empty() {
                Err(Error::ContradictoryRule { feature })
            } else if known.len() == levels.len() {
                Ok(None)
            } else {
                Ok(Some(Test::MemberOf(known)))
            }
        }
        (kind, test) => Err(Error::FeatureKindMismatch {
            feature,
            expected: test.kind_name(),
            found: kind.name(),
        }),
    }
}

pub fn rule_length(rule: &Rule) -> usize {
    rule.len()
}

pub fn rule_activated<O: Observation + ?Sized>(rule: &Rule, x: &O) -> Result<bool> {
    rule.is_activated(x)
}

/// The rules of a fitted model plus the prediction used when none fires.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet {
    pub task: TaskKind,
    pub rules: Vec<Rule>,
    pub default_prediction: Prediction,
}

impl RuleSet {
    pub fn new(task: TaskKind, rules: Vec<Rule>, default_prediction: Prediction) -> Result<Self> {
        let kind_ok = |p: &Prediction| p.task() == task;
        if !kind_ok(&default_prediction) || !rules.iter().all(|r| kind_ok(&r.prediction)) {
            return Err(Error::PredictionKind {
                task: task.as_str(),
            });
        }
        Ok(RuleSet {
            task,
            rules,
            default_prediction,
        })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn interpretability_index(&self) -> usize {
        interpretability_index(self)
    }

    /// Canonicalize every rule against `schema`.
    pub fn canonicalized_in(&self, schema: &Schema) -> Result<RuleSet> {
        let rules = self
            .rules
            .iter()
            .map(|r| canonicalize_in(r, schema))
            .collect::<Result<Vec<_>>>()?;
        Ok(RuleSet {
            rules,
            ..self.clone()
        })
    }
}

/// Sum of rule lengths.
pub fn interpretability_index(rs: &RuleSet) -> usize {
    rs.rules.iter().map(Rule::len).sum()
}

/// One rule per leaf, built from the root-to-leaf split conditions.
/// A single-leaf tree gives an empty rule set whose default is the leaf value.
pub fn tree_to_rules(tree: &DecisionTree, task: TaskKind) -> Result<RuleSet> {
    let mut rules = Vec::new();
    let mut stack: Vec<(usize, Vec<Condition>)> = vec![(0, Vec::new())];
    while let Some((id, path)) = stack.pop() {
        let node = tree.node(id);
        match &node.kind {
            NodeKind::Leaf => {
                if !path.is_empty() {
                    let rule = Rule::new(path, node.value.clone());
                    rules.push(canonicalize_in(&rule, tree.schema())?);
                }
            }
            NodeKind::Split {
                feature,
                split,
                left,
                right,
            } => {
                let (lt, rt) = split_tests(*feature, split, tree.schema())?;
                let mut right_path = path.clone();
                right_path.push(Condition::new(*feature, rt));
                stack.push((*right, right_path));
                let mut left_path = path;
                left_path.push(Condition::new(*feature, lt));
                stack.push((*left, left_path));
            }
        }
    }
    RuleSet::new(task, rules, tree.node(0).value.clone())
}

/// Conditions for the left and right branches of a split.
pub(crate) fn split_tests(feature: usize, split: &Split, schema: &Schema) -> Result<(Test, Test)> {
    match split {
        Split::LessOrEqual(t) => Ok((Test::at_most(*t), Test::greater_than(*t))),
        Split::Equals(category) => {
            let levels = match schema.get(feature) {
                Some(FeatureKind::Categorical { levels }) => levels,
                Some(k) => {
                    return Err(Error::FeatureKindMismatch {
                        feature,
                        expected: "categorical",
                        found: k.name(),
                    })
                }
                None => {
                    return Err(Error::FeatureOutOfRange {
                        feature,
                        d: schema.len(),
                    })
                }
            };
            let left: BTreeSet<String> = std::iter::once(category.clone()).collect();
            let right: BTreeSet<String> = levels.iter().filter(|l| *l != category).cloned().collect();
            Ok((Test::MemberOf(left), Test::MemberOf(right)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Value;

    fn rule(conds: Vec<Condition>) -> Rule {
        Rule::new(conds, Prediction::Real(1.0))
    }

    #[test]
    fn merges_conditions_on_one_feature() {
        let r = rule(vec![
            Condition::new(0, Test::at_most(5.0)),
            Condition::new(0, Test::at_most(3.0)),
        ]);
        let c = canonicalize(&r).unwrap();
        assert_eq!(c.conditions, vec![Condition::new(0, Test::at_most(3.0))]);
        assert_eq!(rule_length(&c), 1);
    }

    #[test]
    fn sorts_by_feature_index() {
        let r = rule(vec![
            Condition::new(2, Test::greater_than(1.0)),
            Condition::new(0, Test::member_of(&["a", "b"])),
        ]);
        let c = canonicalize(&r).unwrap();
        let features: Vec<usize> = c.conditions.iter().map(|c| c.feature).collect();
        assert_eq!(features, [0, 2]);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn contradictory_rule_is_an_error() {
        let r = rule(vec![
            Condition::new(0, Test::at_most(3.0)),
            Condition::new(0, Test::greater_than(7.0)),
        ]);
        assert!(matches!(canonicalize(&r), Err(Error::ContradictoryRule { feature: 0 })));
        let r = rule(vec![
            Condition::new(1, Test::member_of(&["a"])),
            Condition::new(1, Test::member_of(&["b"])),
        ]);
        assert!(matches!(canonicalize(&r), Err(Error::ContradictoryRule { feature: 1 })));
    }

    #[test]
    fn vacuous_rules_and_mixed_kinds() {
        let r = rule(vec![Condition::new(0, Test::interval(f64::NEG_INFINITY, f64::INFINITY))]);
        assert!(matches!(canonicalize(&r), Err(Error::VacuousRule)));
        assert!(matches!(canonicalize(&rule(vec![])), Err(Error::VacuousRule)));
        let r = rule(vec![
            Condition::new(0, Test::at_most(1.0)),
            Condition::new(0, Test::member_of(&["a"])),
        ]);
        assert!(matches!(canonicalize(&r), Err(Error::MixedConditionKinds { feature: 0 })));
    }

    #[test]
    fn schema_drops_full_category_sets() {
        let schema = Schema::new(vec![
            FeatureKind::Categorical {
                levels: vec!["a".into(), "b".into()],
            },
            FeatureKind::Continuous,
        ]);
        let r = rule(vec![
            Condition::new(0, Test::member_of(&["a", "b"])),
            Condition::new(1, Test::at_most(2.0)),
        ]);
        let c = canonicalize_in(&r, &schema).unwrap();
        assert_eq!(c.len(), 1);
        let bad = rule(vec![Condition::new(1, Test::member_of(&["a"]))]);
        assert!(matches!(
            canonicalize_in(&bad, &schema),
            Err(Error::FeatureKindMismatch { feature: 1, .. })
        ));
    }

    #[test]
    fn activation_uses_half_open_intervals() {
        let r = rule(vec![Condition::new(0, Test::at_most(3.0))]);
        assert!(rule_activated(&r, &vec![3.0]).unwrap());
        let r = rule(vec![Condition::new(0, Test::interval(3.0, 7.0))]);
        assert!(!rule_activated(&r, &vec![3.0]).unwrap());
        assert!(rule_activated(&r, &vec![7.0]).unwrap());
        let r = rule(vec![Condition::new(1, Test::member_of(&["a"]))]);
        let x = vec![Value::Num(0.0), Value::Cat("b".into())];
        assert!(!rule_activated(&r, &x).unwrap());
        assert!(matches!(
            rule_activated(&r, &vec![Value::Num(0.0)]),
            Err(Error::MissingFeature { feature: 1 })
        ));
    }

    #[test]
    fn interpretability_index_sums_lengths() {
        let mk = |k: usize| rule((0..k).map(|f| Condition::new(f, Test::at_most(0.0))).collect());
        let many = RuleSet::new(TaskKind::Regression, (0..100).map(|_| mk(1)).collect(), Prediction::Real(0.0)).unwrap();
        let one = RuleSet::new(TaskKind::Regression, vec![mk(100)], Prediction::Real(0.0)).unwrap();
        assert_eq!(interpretability_index(&many), 100);
        assert_eq!(interpretability_index(&one), 100);
        let mixed = RuleSet::new(TaskKind::Regression, vec![mk(1), mk(2), mk(3)], Prediction::Real(0.0)).unwrap();
        assert_eq!(mixed.interpretability_index(), 6);
        let empty = RuleSet::new(TaskKind::Regression, vec![], Prediction::Real(0.0)).unwrap();
        assert_eq!(empty.interpretability_index(), 0);
    }

    #[test]
    fn rule_set_rejects_wrong_prediction_kind() {
        let r = RuleSet::new(TaskKind::Classification, vec![], Prediction::Real(0.0));
        assert!(matches!(r, Err(Error::PredictionKind { .. })));
    }
}
