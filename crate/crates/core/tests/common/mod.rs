//! Shared generators, oracles and property checks for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rulescore::data::Schema;
use rulescore::discretize::{bin_of, discretize_ruleset, fit_quantile_grid};
use rulescore::learners::{predict_ruleset, DecisionTree, NodeKind, Split, TreeNode};
use rulescore::rules::{canonicalize, tree_to_rules, Condition, Rule, RuleSet, Test};
use rulescore::scores::{dice_sorensen, interpretability, predictivity, simplicity_scores, Weights};
use rulescore::{Column, Dataset, Prediction, TaskKind, Targets};

pub const CASES: u32 = 256;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Run `check` on `CASES` generated inputs; `Err` carries the minimal failure.
pub fn run_property<S, F>(strategy: S, check: F) -> Result<(), String>
where
    S: Strategy,
    S::Value: std::fmt::Debug,
    F: Fn(S::Value) -> Result<(), TestCaseError>,
{
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

pub fn integer_dataset(r: &mut ChaCha8Rng, n: usize, d: usize, lo: i32, hi: i32) -> Dataset {
    let features = (0..d)
        .map(|f| {
            let v = (0..n).map(|_| f64::from(r.gen_range(lo..=hi))).collect();
            Column::continuous(format!("x{f}"), v)
        })
        .collect();
    let y = (0..n).map(|_| r.gen_range(-5.0..5.0)).collect();
    Dataset::new("random", features, "y", Targets::Real(y)).unwrap()
}

fn random_bound(r: &mut ChaCha8Rng) -> f64 {
    match r.gen_range(0..10) {
        0 => f64::NEG_INFINITY,
        1 => f64::INFINITY,
        _ => f64::from(r.gen_range(-12..=12)) + if r.gen_bool(0.3) { 0.5 } else { 0.0 },
    }
}

/// Up to `max_rules` canonical rules over `d` continuous features.
pub fn random_rule_set(r: &mut ChaCha8Rng, d: usize, max_rules: usize) -> RuleSet {
    let n_rules = r.gen_range(0..=max_rules);
    let mut rules = Vec::with_capacity(n_rules);
    while rules.len() < n_rules {
        let mut conditions = Vec::new();
        for f in 0..d {
            if r.gen_bool(0.5) {
                let (a, b) = (random_bound(r), random_bound(r));
                if a < b {
                    conditions.push(Condition::new(f, Test::interval(a, b)));
                }
            }
        }
        if let Ok(rule) = canonicalize(&Rule::new(conditions, Prediction::Real(r.gen_range(-1.0..1.0)))) {
            if !rule.conditions.is_empty() {
                rules.push(rule);
            }
        }
    }
    RuleSet::new(TaskKind::Regression, rules, Prediction::Real(0.0)).unwrap()
}

/// Count-based empirical quantile: the smallest sample value v with
/// `#{x <= v} >= n*p/q`.
pub fn oracle_cuts(values: &[f64], q: usize) -> Vec<f64> {
    let n = values.len() as f64;
    let mut cuts: Vec<f64> = Vec::new();
    for p in 1..q {
        let need = n * p as f64 / q as f64;
        let best = values
            .iter()
            .copied()
            .filter(|v| values.iter().filter(|x| *x <= v).count() as f64 >= need - 1e-9)
            .fold(f64::INFINITY, f64::min);
        if cuts.last() != Some(&best) {
            cuts.push(best);
        }
    }
    cuts
}

/// 1 + number of cuts strictly below `v`, by linear scan.
pub fn oracle_bin(cuts: &[f64], v: f64) -> u32 {
    1 + cuts.iter().filter(|c| **c < v).count() as u32
}

type OracleRule = Vec<(usize, u32, u32)>;

fn oracle_discretize(cuts: &[Vec<f64>], rs: &RuleSet) -> Vec<OracleRule> {
    rs.rules
        .iter()
        .map(|rule| {
            rule.conditions
                .iter()
                .map(|c| match c.test {
                    Test::Interval { lower, upper } => {
                        (c.feature, oracle_bin(&cuts[c.feature], lower), oracle_bin(&cuts[c.feature], upper))
                    }
                    Test::MemberOf(_) => unreachable!("continuous features only"),
                })
                .collect()
        })
        .collect()
}

fn dedup_pairwise(rules: Vec<OracleRule>) -> Vec<OracleRule> {
    let mut out: Vec<OracleRule> = Vec::new();
    for r in rules {
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Dice-Sorensen by explicit pairwise comparison of discretized rules.
pub fn oracle_dice(data: &Dataset, q: usize, a: &RuleSet, b: &RuleSet) -> f64 {
    let cuts: Vec<Vec<f64>> = data
        .features()
        .iter()
        .map(|c| oracle_cuts(c.as_continuous().unwrap(), q))
        .collect();
    let da = dedup_pairwise(oracle_discretize(&cuts, a));
    let db = dedup_pairwise(oracle_discretize(&cuts, b));
    let common = da.iter().filter(|x| db.iter().any(|y| y == *x)).count();
    let total = da.len() + db.len();
    if total == 0 {
        0.0
    } else {
        2.0 * common as f64 / total as f64
    }
}

pub fn library_dice(data: &Dataset, q: usize, a: &RuleSet, b: &RuleSet) -> f64 {
    let grid = fit_quantile_grid(data, q).unwrap();
    dice_sorensen(&discretize_ruleset(&grid, a).unwrap(), &discretize_ruleset(&grid, b).unwrap())
}

/// One oracle comparison: random data, random q in {4, 10}, two random rule sets.
pub fn dice_case(seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let d = r.gen_range(1..=5);
    let n = r.gen_range(10..=60);
    let q = if r.gen_bool(0.5) { 4 } else { 10 };
    let data = integer_dataset(&mut r, n, d, -12, 12);
    let a = random_rule_set(&mut r, d, 20);
    // Share some rules so that intersections are common.
    let mut b = random_rule_set(&mut r, d, 20);
    for rule in &a.rules {
        if r.gen_bool(0.3) {
            b.rules.push(rule.clone());
        }
    }
    (library_dice(&data, q, &a, &b), oracle_dice(&data, q, &a, &b))
}

/// Random regression tree whose paths are never contradictory: each split
/// threshold lies strictly inside the region reaching it.
pub fn random_tree(r: &mut ChaCha8Rng, d: usize, max_depth: usize) -> DecisionTree {
    fn grow(
        r: &mut ChaCha8Rng,
        nodes: &mut Vec<TreeNode>,
        region: &mut Vec<(i32, i32)>,
        depth: usize,
        max_depth: usize,
    ) -> usize {
        let id = nodes.len();
        let value = Prediction::Real(f64::from(r.gen_range(-100..100)));
        nodes.push(TreeNode::leaf(value.clone()));
        let force = depth == 0;
        if depth >= max_depth || (!force && r.gen_bool(0.35)) {
            return id;
        }
        let f = r.gen_range(0..region.len());
        let (lo, hi) = region[f];
        if hi - lo < 2 {
            return id;
        }
        let t = r.gen_range(lo + 1..hi);
        region[f] = (lo, t);
        let left = grow(r, nodes, region, depth + 1, max_depth);
        region[f] = (t, hi);
        let right = grow(r, nodes, region, depth + 1, max_depth);
        region[f] = (lo, hi);
        nodes[id] = TreeNode::split(f, Split::LessOrEqual(f64::from(t)), left, right, value);
        id
    }
    let mut nodes = Vec::new();
    let mut region = vec![(-20, 20); d];
    grow(r, &mut nodes, &mut region, 0, max_depth);
    DecisionTree::new(nodes, Schema::all_continuous(d), TaskKind::Regression).unwrap()
}

fn random_point(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d)
        .map(|_| {
            // Hit thresholds exactly now and then.
            if r.gen_bool(0.3) {
                f64::from(r.gen_range(-25..=25))
            } else {
                r.gen_range(-25.0..25.0)
            }
        })
        .collect()
}

// ---- property checks ----

pub fn prop_dice(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let d = r.gen_range(1..=4);
    let data = integer_dataset(&mut r, 40, d, -12, 12);
    let grid = fit_quantile_grid(&data, 10).unwrap();
    let a = discretize_ruleset(&grid, &random_rule_set(&mut r, d, 8)).unwrap();
    let b = discretize_ruleset(&grid, &random_rule_set(&mut r, d, 8)).unwrap();
    let ab = dice_sorensen(&a, &b);
    prop_assert_eq!(ab, dice_sorensen(&b, &a));
    prop_assert!((0.0..=1.0).contains(&ab));
    prop_assert_eq!(dice_sorensen(&a, &a), if a.is_empty() { 0.0 } else { 1.0 });
    let empty: std::collections::BTreeSet<rulescore::discretize::DiscretizedRule> = Default::default();
    prop_assert_eq!(dice_sorensen(&empty, &empty), 0.0);
    Ok(())
}

pub fn prop_predictivity((risk, baseline): (f64, f64)) -> Result<(), TestCaseError> {
    prop_assert_eq!(predictivity(baseline, baseline).unwrap(), 0.0);
    let p = predictivity(risk, baseline).unwrap();
    prop_assert_eq!(p == 1.0, risk == 0.0);
    prop_assert!(p <= 1.0);
    Ok(())
}

pub fn prop_simplicity(ints: Vec<usize>) -> Result<(), TestCaseError> {
    let map: BTreeMap<usize, usize> = ints.iter().copied().enumerate().collect();
    let s = simplicity_scores(&map).unwrap();
    let min = ints.iter().copied().filter(|v| *v > 0).min().unwrap();
    for (k, v) in &map {
        let score = s[k];
        prop_assert!((0.0..=1.0).contains(&score));
        prop_assert_eq!(score == 1.0, *v == min, "int {} min {}", v, min);
    }
    Ok(())
}

pub fn prop_interpretability((pred, stab, simp, a, b, c): (f64, f64, f64, f64, f64, f64)) -> Result<(), TestCaseError> {
    let w = Weights::normalized(a, b, c).unwrap();
    prop_assert!((w.alpha1 + w.alpha2 + w.alpha3 - 1.0).abs() <= 1e-12);
    let v = interpretability(pred, stab, simp, &w);
    prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "value {}", v);
    let expected = w.alpha1 * pred.max(0.0) + w.alpha2 * stab + w.alpha3 * simp;
    prop_assert!((v - expected).abs() <= 1e-12);
    Ok(())
}

pub fn prop_partition(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let d = r.gen_range(1..=4);
    let tree = random_tree(&mut r, d, 5);
    let rs = tree_to_rules(&tree, TaskKind::Regression).unwrap();
    prop_assert_eq!(rs.len(), tree.n_leaves());
    for _ in 0..50 {
        let x = random_point(&mut r, d);
        let fired: Vec<&Rule> = rs.rules.iter().filter(|rule| rule.is_activated(&x).unwrap()).collect();
        prop_assert_eq!(fired.len(), 1, "point {:?}", x);
        prop_assert_eq!(&fired[0].prediction, &tree.predict(&x).unwrap());
        prop_assert_eq!(predict_ruleset(&rs, &x).unwrap(), tree.predict(&x).unwrap());
    }
    Ok(())
}

pub fn prop_canonicalize_idempotent(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let d = r.gen_range(1..=4);
    let mut conditions = Vec::new();
    for _ in 0..r.gen_range(0..8) {
        let f = r.gen_range(0..d);
        let test = match r.gen_range(0..3) {
            0 => Test::at_most(random_bound(&mut r)),
            1 => Test::greater_than(random_bound(&mut r)),
            _ => Test::interval(random_bound(&mut r), random_bound(&mut r)),
        };
        conditions.push(Condition::new(f, test));
    }
    conditions.reverse();
    let rule = Rule::new(conditions, Prediction::Real(1.0));
    if let Ok(once) = canonicalize(&rule) {
        let twice = canonicalize(&once).unwrap();
        prop_assert_eq!(&once, &twice);
        for _ in 0..20 {
            let x = random_point(&mut r, d);
            prop_assert_eq!(rule.is_activated(&x).unwrap(), once.is_activated(&x).unwrap());
        }
    }
    Ok(())
}

pub fn prop_bin_monotone(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let q = r.gen_range(2..=12);
    let n = r.gen_range(1..80);
    let data = integer_dataset(&mut r, n, 1, -30, 30);
    let grid = fit_quantile_grid(&data, q).unwrap();
    let mut vs: Vec<f64> = (0..40).map(|_| r.gen_range(-40.0..40.0)).collect();
    vs.extend([f64::NEG_INFINITY, f64::INFINITY]);
    vs.sort_by(f64::total_cmp);
    let bins: Vec<u32> = vs.iter().map(|v| bin_of(&grid, 0, *v).unwrap()).collect();
    prop_assert!(bins.windows(2).all(|w| w[0] <= w[1]));
    prop_assert_eq!(bins[0], 1);
    prop_assert!(*bins.last().unwrap() as usize <= q);
    Ok(())
}

/// Strictly increasing map `x -> c + b*x + a*x^3`.
fn warp(a: f64, b: f64, c: f64) -> impl Fn(f64) -> f64 {
    move |x| if x.is_infinite() { x } else { c + b * x + a * x * x * x }
}

pub fn prop_scale_covariance(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let d = r.gen_range(1..=4);
    let q = if r.gen_bool(0.5) { 4 } else { 10 };
    let n = r.gen_range(8..60);
    let data = integer_dataset(&mut r, n, d, -12, 12);
    let rs = random_rule_set(&mut r, d, 10);
    let g = warp(f64::from(r.gen_range(0..4)) / 8.0, f64::from(r.gen_range(1..9)) / 4.0, f64::from(r.gen_range(-20..20)));

    let warped_cols = data
        .features()
        .iter()
        .map(|c| Column::continuous(c.name.clone(), c.as_continuous().unwrap().iter().map(|v| g(*v)).collect()))
        .collect();
    let warped_data = Dataset::new("warped", warped_cols, "y", data.targets().clone()).unwrap();
    let warped_rules: Vec<Rule> = rs
        .rules
        .iter()
        .map(|rule| {
            let conditions = rule
                .conditions
                .iter()
                .map(|c| match c.test {
                    Test::Interval { lower, upper } => Condition::new(c.feature, Test::interval(g(lower), g(upper))),
                    ref t => Condition::new(c.feature, t.clone()),
                })
                .collect();
            Rule::new(conditions, rule.prediction.clone())
        })
        .collect();
    let warped_rs = RuleSet::new(TaskKind::Regression, warped_rules, Prediction::Real(0.0)).unwrap();

    let before = discretize_ruleset(&fit_quantile_grid(&data, q).unwrap(), &rs).unwrap();
    let after = discretize_ruleset(&fit_quantile_grid(&warped_data, q).unwrap(), &warped_rs).unwrap();
    prop_assert_eq!(before, after);
    Ok(())
}

pub fn risk_pair() -> impl Strategy<Value = (f64, f64)> {
    (0.0f64..100.0, 1e-6f64..100.0).prop_map(|(m, b)| (if m < 5.0 { 0.0 } else { m }, b))
}

pub fn int_indices() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..40, 2..8).prop_filter("one non-empty model", |v| v.iter().any(|x| *x > 0))
}

pub fn score_inputs() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64)> {
    (-5.0f64..=1.0, 0.0f64..=1.0, 0.0f64..=1.0, 0.0f64..10.0, 0.0f64..10.0, 0.0f64..10.0)
        .prop_filter("positive weight sum", |t| t.3 + t.4 + t.5 > 1e-3)
}

/// Sum of squared deviations from the mean.
pub fn sse(y: &[f64]) -> f64 {
    if y.is_empty() {
        return 0.0;
    }
    let m = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| (v - m).powi(2)).sum()
}

/// Largest SSE reduction over every feature and every midpoint split.
pub fn brute_force_best_split(data: &Dataset, y: &[f64]) -> Option<(f64, usize, f64)> {
    let total = sse(y);
    let mut best: Option<(f64, usize, f64)> = None;
    for f in 0..data.d() {
        let x = data.feature(f).as_continuous().unwrap();
        let mut values: Vec<f64> = x.to_vec();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let t = (w[0] + w[1]) / 2.0;
            let left: Vec<f64> = (0..y.len()).filter(|i| x[*i] <= t).map(|i| y[i]).collect();
            let right: Vec<f64> = (0..y.len()).filter(|i| x[*i] > t).map(|i| y[i]).collect();
            let gain = total - sse(&left) - sse(&right);
            if best.is_none_or(|b| gain > b.0) {
                best = Some((gain, f, t));
            }
        }
    }
    best
}

pub fn root_split(tree: &DecisionTree) -> Option<(usize, f64)> {
    match &tree.node(0).kind {
        NodeKind::Split {
            feature,
            split: Split::LessOrEqual(t),
            ..
        } => Some((*feature, *t)),
        _ => None,
    }
}
