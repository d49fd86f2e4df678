//! Best-first CART growth with variance (regression) or Gini (classification)
//! impurity.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tree::{DecisionTree, NodeKind, Split, TreeNode};
use crate::data::{mean, mode, ClassLabel, ColumnData, Dataset, Prediction, Targets};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CartParams {
    pub max_leaf_nodes: usize,
    pub min_samples_leaf: usize,
    /// Maximum depth; `None` means unbounded.
    pub max_depth: Option<usize>,
    /// Features drawn (without replacement) per node; `None` means all.
    pub max_features: Option<usize>,
    /// Seeds feature subsampling. Without `max_features` the fit is seed-independent.
    pub seed: u64,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            max_leaf_nodes: 20,
            min_samples_leaf: 1,
            max_depth: None,
            max_features: None,
            seed: 0,
        }
    }
}

impl CartParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_leaf_nodes < 2 {
            return Err(Error::InvalidParameter {
                name: "max_leaf_nodes",
                reason: format!("must be >= 2, got {}", self.max_leaf_nodes),
            });
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidParameter {
                name: "min_samples_leaf",
                reason: "must be >= 1".into(),
            });
        }
        if self.max_features == Some(0) {
            return Err(Error::InvalidParameter {
                name: "max_features",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// Target column re-encoded for impurity computations.
enum Response {
    Real(Vec<f64>),
    Class { codes: Vec<usize>, labels: Vec<ClassLabel> },
}

impl Response {
    fn new(targets: &Targets) -> Self {
        match targets {
            Targets::Real(v) => Response::Real(v.clone()),
            Targets::Class(v) => {
                let mut labels = v.clone();
                labels.sort();
                labels.dedup();
                let codes = v.iter().map(|l| labels.binary_search(l).unwrap()).collect();
                Response::Class { codes, labels }
            }
        }
    }

    fn is_pure(&self, rows: &[usize]) -> bool {
        match self {
            Response::Real(y) => rows.iter().all(|&i| y[i] == y[rows[0]]),
            Response::Class { codes, .. } => rows.iter().all(|&i| codes[i] == codes[rows[0]]),
        }
    }

    fn node_value(&self, rows: &[usize]) -> Prediction {
        match self {
            Response::Real(y) => {
                let v: Vec<f64> = rows.iter().map(|&i| y[i]).collect();
                Prediction::Real(mean(&v))
            }
            Response::Class { codes, labels } => {
                let l: Vec<&ClassLabel> = rows.iter().map(|&i| &labels[codes[i]]).collect();
                Prediction::Class(mode(l).expect("non-empty node"))
            }
        }
    }

    fn n_classes(&self) -> usize {
        match self {
            Response::Real(_) => 0,
            Response::Class { labels, .. } => labels.len(),
        }
    }
}

/// Running sufficient statistics for one side of a split.
#[derive(Clone)]
enum Stats {
    Real { n: usize, sum: f64 },
    Class { n: usize, counts: Vec<usize> },
}

impl Stats {
    fn empty(resp: &Response) -> Self {
        match resp {
            Response::Real(_) => Stats::Real { n: 0, sum: 0.0 },
            Response::Class { .. } => Stats::Class {
                n: 0,
                counts: vec![0; resp.n_classes()],
            },
        }
    }

    fn of(resp: &Response, rows: &[usize]) -> Self {
        let mut s = Stats::empty(resp);
        for &i in rows {
            s.add(resp, i);
        }
        s
    }

    fn n(&self) -> usize {
        match self {
            Stats::Real { n, .. } | Stats::Class { n, .. } => *n,
        }
    }

    fn add(&mut self, resp: &Response, row: usize) {
        match (self, resp) {
            (Stats::Real { n, sum }, Response::Real(y)) => {
                *n += 1;
                *sum += y[row];
            }
            (Stats::Class { n, counts }, Response::Class { codes, .. }) => {
                *n += 1;
                counts[codes[row]] += 1;
            }
            _ => unreachable!("stats and response kinds agree"),
        }
    }

    fn remove(&mut self, resp: &Response, row: usize) {
        match (self, resp) {
            (Stats::Real { n, sum }, Response::Real(y)) => {
                *n -= 1;
                *sum -= y[row];
            }
            (Stats::Class { n, counts }, Response::Class { codes, .. }) => {
                *n -= 1;
                counts[codes[row]] -= 1;
            }
            _ => unreachable!("stats and response kinds agree"),
        }
    }
}

/// Impurity decrease `n*I(parent) - nL*I(left) - nR*I(right)`, with `I` the
/// variance or the Gini index. Never negative.
fn impurity_decrease(left: &Stats, right: &Stats) -> f64 {
    match (left, right) {
        (Stats::Real { n: nl, sum: sl }, Stats::Real { n: nr, sum: sr }) => {
            let (nl, nr) = (*nl as f64, *nr as f64);
            let diff = sl / nl - sr / nr;
            nl * nr / (nl + nr) * diff * diff
        }
        (Stats::Class { n: nl, counts: cl }, Stats::Class { n: nr, counts: cr }) => {
            let (nl, nr) = (*nl as f64, *nr as f64);
            let sq = |c: &[usize]| c.iter().map(|&k| (k * k) as f64).sum::<f64>();
            let parent: Vec<usize> = cl.iter().zip(cr).map(|(a, b)| a + b).collect();
            (sq(cl) / nl + sq(cr) / nr - sq(&parent) / (nl + nr)).max(0.0)
        }
        _ => unreachable!("stats kinds agree"),
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    feature: usize,
    split: Split,
    decrease: f64,
    left: Vec<usize>,
    right: Vec<usize>,
}

/// Best split of `rows` over `features`, ties going to the lower feature
/// index and then the lower threshold (or category).
fn best_split(
    data: &Dataset,
    resp: &Response,
    rows: &[usize],
    features: &[usize],
    min_leaf: usize,
) -> Option<Candidate> {
    if rows.len() < 2 * min_leaf || resp.is_pure(rows) {
        return None;
    }
    let total = Stats::of(resp, rows);
    let mut best: Option<(usize, Split, f64)> = None;
    let mut consider = |feature: usize, split: Split, decrease: f64| {
        if decrease > 0.0 && best.as_ref().is_none_or(|b| decrease > b.2) {
            best = Some((feature, split, decrease));
        }
    };

    for &f in features {
        match &data.feature(f).data {
            ColumnData::Continuous(x) => {
                let mut sorted = rows.to_vec();
                sorted.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
                let mut left = Stats::empty(resp);
                let mut right = total.clone();
                for k in 0..sorted.len() - 1 {
                    left.add(resp, sorted[k]);
                    right.remove(resp, sorted[k]);
                    let (lo, hi) = (x[sorted[k]], x[sorted[k + 1]]);
                    if lo == hi || left.n() < min_leaf || right.n() < min_leaf {
                        continue;
                    }
                    let mut t = lo / 2.0 + hi / 2.0;
                    if t >= hi {
                        t = lo;
                    }
                    consider(f, Split::LessOrEqual(t), impurity_decrease(&left, &right));
                }
            }
            ColumnData::Categorical { codes, levels } => {
                let mut present: Vec<u32> = rows.iter().map(|&i| codes[i]).collect();
                present.sort_unstable();
                present.dedup();
                if present.len() < 2 {
                    continue;
                }
                for code in present {
                    let mut left = Stats::empty(resp);
                    for &i in rows.iter().filter(|&&i| codes[i] == code) {
                        left.add(resp, i);
                    }
                    let mut right = total.clone();
                    for &i in rows.iter().filter(|&&i| codes[i] == code) {
                        right.remove(resp, i);
                    }
                    if left.n() < min_leaf || right.n() < min_leaf {
                        continue;
                    }
                    let split = Split::Equals(levels[code as usize].clone());
                    consider(f, split, impurity_decrease(&left, &right));
                }
            }
        }
    }

    let (feature, split, decrease) = best?;
    let goes_left = |i: usize| match (&split, &data.feature(feature).data) {
        (Split::LessOrEqual(t), ColumnData::Continuous(x)) => x[i] <= *t,
        (Split::Equals(c), ColumnData::Categorical { codes, levels }) => &levels[codes[i] as usize] == c,
        _ => unreachable!("split kind follows column kind"),
    };
    let (left, right): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| goes_left(i));
    Some(Candidate {
        feature,
        split,
        decrease,
        left,
        right,
    })
}

struct Frontier {
    node: usize,
    depth: usize,
    best: Option<Candidate>,
}

/// Fit a CART tree by best-first growth: the leaf whose best split has the
/// largest impurity decrease is split next, until `max_leaf_nodes` leaves
/// exist or no leaf admits a split. Ties between leaves go to the older leaf.
pub fn fit_cart(data: &Dataset, params: &CartParams) -> Result<DecisionTree> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let resp = Response::new(data.targets());
    let d = data.d();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut draw_features = || -> Vec<usize> {
        match params.max_features {
            Some(m) if m < d => {
                let mut f = sample(&mut rng, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    };
    let depth_ok = |depth: usize| params.max_depth.is_none_or(|m| depth < m);

    let all: Vec<usize> = (0..data.n()).collect();
    let mut nodes = vec![TreeNode {
        value: resp.node_value(&all),
        n_samples: all.len(),
        kind: NodeKind::Leaf,
    }];
    let root_best = if depth_ok(0) {
        best_split(data, &resp, &all, &draw_features(), params.min_samples_leaf)
    } else {
        None
    };
    let mut frontier = vec![Frontier {
        node: 0,
        depth: 0,
        best: root_best,
    }];
    let mut n_leaves = 1;

    while n_leaves < params.max_leaf_nodes {
        let pick = frontier
            .iter()
            .enumerate()
            .filter_map(|(i, f)| f.best.as_ref().map(|b| (i, b.decrease, f.node)))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.2.cmp(&a.2)));
        let Some((idx, _, _)) = pick else { break };
        let leaf = frontier.swap_remove(idx);
        let cand = leaf.best.expect("picked leaf has a candidate");

        let mut children = [0usize; 2];
        for (slot, rows) in [&cand.left, &cand.right].into_iter().enumerate() {
            let id = nodes.len();
            nodes.push(TreeNode {
                value: resp.node_value(rows),
                n_samples: rows.len(),
                kind: NodeKind::Leaf,
            });
            children[slot] = id;
            let best = if depth_ok(leaf.depth + 1) {
                best_split(data, &resp, rows, &draw_features(), params.min_samples_leaf)
            } else {
                None
            };
            frontier.push(Frontier {
                node: id,
                depth: leaf.depth + 1,
                best,
            });
        }
        nodes[leaf.node].kind = NodeKind::Split {
            feature: cand.feature,
            split: cand.split,
            left: children[0],
            right: children[1],
        };
        n_leaves += 1;
    }

    DecisionTree::new(nodes, data.schema(), data.task())
}
