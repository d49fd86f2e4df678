//! SIRUS-lite: rules extracted from a forest of shallow trees grown on
//! quantile-binned features, kept when they recur across trees.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cart::{fit_cart, CartParams};
use super::tree::{DecisionTree, NodeKind, Split, TreeNode};
use super::FitOutcome;
use crate::data::{mean, mode, Column, ColumnData, Dataset, Prediction, TaskKind, Targets};
use crate::discretize::{fit_quantile_grid, QuantileGrid, DEFAULT_Q};
use crate::error::{Error, Result};
use crate::rules::{canonicalize_in, split_tests, Condition, Rule, RuleSet};
use crate::scores::baseline_prediction;

#[derive(Clone, Debug, PartialEq)]
pub struct SirusLiteParams {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Minimum fraction of trees a rule must appear in.
    pub p0: f64,
    /// Bin count of the pre-discretization grid.
    pub q: usize,
    pub max_rules: usize,
    pub seed: u64,
}

impl Default for SirusLiteParams {
    fn default() -> Self {
        SirusLiteParams {
            n_trees: 200,
            max_depth: 3,
            p0: 0.05,
            q: DEFAULT_Q,
            max_rules: 10,
            seed: 0,
        }
    }
}

impl SirusLiteParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if self.n_trees < 1 {
            return bad("n_trees", "must be >= 1");
        }
        if self.max_depth < 1 {
            return bad("max_depth", "must be >= 1");
        }
        if !(self.p0 > 0.0 && self.p0 <= 1.0) {
            return bad("p0", "must lie in (0, 1]");
        }
        if self.q < 2 {
            return bad("q", "must be >= 2");
        }
        if self.max_rules < 1 {
            return bad("max_rules", "must be >= 1");
        }
        Ok(())
    }
}

/// Continuous columns replaced by their 1-based bin index on `grid`.
fn binned(data: &Dataset, grid: &QuantileGrid) -> Result<Dataset> {
    let features = data
        .features()
        .iter()
        .enumerate()
        .map(|(f, col)| match &col.data {
            ColumnData::Continuous(v) => {
                let bins = v
                    .iter()
                    .map(|&x| grid.bin_of(f, x).map(f64::from))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Column::continuous(col.name.clone(), bins))
            }
            ColumnData::Categorical { .. } => Ok(col.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(data.name(), features, data.target_name(), data.targets().clone())
}

/// Map thresholds on bin indices back to cut values: `bin <= k` is `x <= cuts[k-1]`.
fn unbin_tree(tree: &DecisionTree, grid: &QuantileGrid, data: &Dataset) -> Result<DecisionTree> {
    let nodes = tree
        .nodes()
        .iter()
        .map(|node| {
            let kind = match &node.kind {
                NodeKind::Split {
                    feature,
                    split: Split::LessOrEqual(t),
                    left,
                    right,
                } => {
                    let cuts = grid.cuts(*feature)?;
                    let k = t.floor() as usize;
                    NodeKind::Split {
                        feature: *feature,
                        split: Split::LessOrEqual(cuts[k - 1]),
                        left: *left,
                        right: *right,
                    }
                }
                other => other.clone(),
            };
            Ok(TreeNode {
                kind,
                ..node.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    DecisionTree::new(nodes, data.schema(), data.task())
}

/// Canonical condition lists of every non-root node of `tree`.
pub fn node_paths(tree: &DecisionTree) -> Result<Vec<Vec<Condition>>> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, Vec<Condition>)> = vec![(0, Vec::new())];
    while let Some((id, path)) = stack.pop() {
        if !path.is_empty() {
            let r = canonicalize_in(&Rule::new(path.clone(), tree.node(id).value.clone()), tree.schema())?;
            out.push(r.conditions);
        }
        if let NodeKind::Split {
            feature,
            split,
            left,
            right,
        } = &tree.node(id).kind
        {
            let (lt, rt) = split_tests(*feature, split, tree.schema())?;
            let mut lp = path.clone();
            lp.push(Condition::new(*feature, lt));
            let mut rp = path;
            rp.push(Condition::new(*feature, rt));
            stack.push((*right, rp));
            stack.push((*left, lp));
        }
    }
    Ok(out)
}

fn max_features(task: TaskKind, d: usize) -> usize {
    let m = match task {
        TaskKind::Regression => d / 3,
        TaskKind::Classification => (d as f64).sqrt().floor() as usize,
    };
    m.max(1)
}

pub(crate) fn tree_seed(seed: u64, tree_index: usize) -> u64 {
    seed.wrapping_add(tree_index as u64)
}

/// Mean (or majority class) of the targets of the rows the conditions activate.
fn activation_prediction(data: &Dataset, conditions: &[Condition]) -> Result<Option<Prediction>> {
    let rule = Rule::new(conditions.to_vec(), data.targets().get(0));
    let mut rows = Vec::new();
    for row in data.rows() {
        if rule.is_activated(&row)? {
            rows.push(row.index());
        }
    }
    if rows.is_empty() {
        return Ok(None);
    }
    Ok(Some(match data.targets() {
        Targets::Real(y) => Prediction::Real(mean(&rows.iter().map(|&i| y[i]).collect::<Vec<_>>())),
        Targets::Class(y) => Prediction::Class(mode(rows.iter().map(|&i| &y[i])).expect("non-empty")),
    }))
}

pub fn fit_sirus_lite(data: &Dataset, params: &SirusLiteParams) -> Result<FitOutcome> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let grid = fit_quantile_grid(data, params.q)?;
    let bdata = binned(data, &grid)?;
    let n = data.n();
    let cart = CartParams {
        max_leaf_nodes: 1 << params.max_depth.min(16),
        min_samples_leaf: 1,
        max_depth: Some(params.max_depth),
        max_features: Some(max_features(data.task(), data.d())),
        seed: 0,
    };

    let per_tree: Vec<HashSet<Vec<Condition>>> = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let seed = tree_seed(params.seed, t);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let p = CartParams {
                seed: rng.gen(),
                ..cart.clone()
            };
            let tree = fit_cart(&bdata.subset(&rows), &p)?;
            let tree = unbin_tree(&tree, &grid, data)?;
            Ok(node_paths(&tree)?.into_iter().collect())
        })
        .collect::<Result<_>>()?;

    let mut counts: HashMap<Vec<Condition>, usize> = HashMap::new();
    for paths in per_tree {
        for p in paths {
            *counts.entry(p).or_default() += 1;
        }
    }
    let mut ranked: Vec<(Vec<Condition>, usize)> = counts
        .into_iter()
        .filter(|(_, c)| *c as f64 / params.n_trees as f64 >= params.p0 - 1e-12)
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(params.max_rules);

    let mut rules = Vec::with_capacity(ranked.len());
    for (conditions, _) in ranked {
        if let Some(pred) = activation_prediction(data, &conditions)? {
            rules.push(Rule::new(conditions, pred));
        }
    }
    let mut warnings = Vec::new();
    if rules.is_empty() {
        warnings.push(format!(
            "sirus-lite: no rule reached frequency p0={} on '{}'",
            params.p0,
            data.name()
        ));
    }
    let default = baseline_prediction(&data.targets().to_predictions(), data.task())?;
    Ok(FitOutcome {
        rule_set: RuleSet::new(data.task(), rules, default)?,
        warnings,
    })
}
