//! Built-in rule generators and prediction from rule sets.

pub mod cart;
pub mod sirus;
pub mod tree;

pub use cart::{fit_cart, CartParams};
pub use sirus::{fit_sirus_lite, SirusLiteParams};
pub use tree::{DecisionTree, NodeKind, Split, TreeNode};

use crate::data::{mean, mode, Dataset, Observation, Prediction, TaskKind};
use crate::error::Result;
use crate::rules::{tree_to_rules, RuleSet};

/// A fitted rule set plus any non-fatal warnings from fitting.
#[derive(Clone, Debug, PartialEq)]
pub struct FitOutcome {
    pub rule_set: RuleSet,
    pub warnings: Vec<String>,
}

impl From<RuleSet> for FitOutcome {
    fn from(rule_set: RuleSet) -> Self {
        FitOutcome {
            rule_set,
            warnings: Vec::new(),
        }
    }
}

/// A rule-generating algorithm. Fitting must be a pure function of
/// `(data, seed)`.
pub trait Algorithm: Send + Sync {
    fn id(&self) -> &str;
    fn fit(&self, data: &Dataset, seed: u64) -> Result<FitOutcome>;
}

/// CART tree converted to its leaf rules.
#[derive(Clone, Debug)]
pub struct Cart {
    pub params: CartParams,
}

impl Algorithm for Cart {
    fn id(&self) -> &str {
        "cart"
    }

    fn fit(&self, data: &Dataset, seed: u64) -> Result<FitOutcome> {
        let params = CartParams {
            seed,
            ..self.params.clone()
        };
        let tree = fit_cart(data, &params)?;
        Ok(tree_to_rules(&tree, data.task())?.into())
    }
}

#[derive(Clone, Debug)]
pub struct SirusLite {
    pub params: SirusLiteParams,
}

impl Algorithm for SirusLite {
    fn id(&self) -> &str {
        "sirus-lite"
    }

    fn fit(&self, data: &Dataset, seed: u64) -> Result<FitOutcome> {
        let params = SirusLiteParams {
            seed,
            ..self.params.clone()
        };
        fit_sirus_lite(data, &params)
    }
}

/// Returns the same rule set whatever the data.
#[derive(Clone, Debug)]
pub struct FixedRules {
    pub id: String,
    pub rule_set: RuleSet,
}

impl Algorithm for FixedRules {
    fn id(&self) -> &str {
        &self.id
    }

    fn fit(&self, _data: &Dataset, _seed: u64) -> Result<FitOutcome> {
        Ok(self.rule_set.clone().into())
    }
}

/// Regression: mean of the activated rules' predictions. Classification:
/// majority vote, ties to the smallest class. Falls back to the default
/// prediction when no rule fires.
pub fn predict_ruleset<O: Observation + ?Sized>(rs: &RuleSet, x: &O) -> Result<Prediction> {
    let mut fired = Vec::new();
    for r in &rs.rules {
        if r.is_activated(x)? {
            fired.push(&r.prediction);
        }
    }
    if fired.is_empty() {
        return Ok(rs.default_prediction.clone());
    }
    Ok(match rs.task {
        TaskKind::Regression => {
            let v: Vec<f64> = fired.iter().filter_map(|p| p.as_real()).collect();
            Prediction::Real(mean(&v))
        }
        TaskKind::Classification => {
            Prediction::Class(mode(fired.iter().filter_map(|p| p.as_class())).expect("non-empty vote"))
        }
    })
}

pub fn predict_dataset(rs: &RuleSet, data: &Dataset) -> Result<Vec<Prediction>> {
    data.rows().map(|row| predict_ruleset(rs, &row)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{Condition, Rule, Test};

    #[test]
    fn averages_overlapping_rules() {
        let rs = RuleSet::new(
            TaskKind::Regression,
            vec![
                Rule::new(vec![Condition::new(0, Test::at_most(5.0))], Prediction::Real(2.0)),
                Rule::new(vec![Condition::new(1, Test::at_most(5.0))], Prediction::Real(4.0)),
            ],
            Prediction::Real(-1.0),
        )
        .unwrap();
        assert_eq!(predict_ruleset(&rs, &vec![1.0, 1.0]).unwrap(), Prediction::Real(3.0));
        assert_eq!(predict_ruleset(&rs, &vec![9.0, 9.0]).unwrap(), Prediction::Real(-1.0));
    }

    #[test]
    fn votes_with_smallest_class_tie_break() {
        let rule = |c: &str| Rule::new(vec![Condition::new(0, Test::at_most(5.0))], Prediction::class(c));
        let rs = RuleSet::new(
            TaskKind::Classification,
            vec![rule("b"), rule("a"), rule("c"), rule("b"), rule("a")],
            Prediction::class("z"),
        )
        .unwrap();
        assert_eq!(predict_ruleset(&rs, &vec![0.0]).unwrap(), Prediction::class("a"));
    }
}
