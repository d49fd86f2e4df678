//! Empirical quantile grids and bin-indexed rules for the q-stability score.
//!
//! Cut `p` (for `p = 1..q-1`) of a continuous column of `n` sorted values is
//! the order statistic at 0-based index `ceil(n*p/q) - 1`, with duplicate
//! cuts collapsed. Bins are left-open and right-closed: a value equal to a
//! cut belongs to the lower bin.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::data::{ColumnData, Dataset};
use crate::error::{Error, Result};
use crate::rules::{Rule, RuleSet, Test};

pub const DEFAULT_Q: usize = 10;

/// 1-based bin index.
pub type Bin = u32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantileGrid {
    pub q: usize,
    /// Sorted, deduplicated cuts per continuous feature.
    pub cuts: BTreeMap<usize, Vec<f64>>,
    pub fitted_on: String,
}

/// Empirical `p/q` quantiles of a column, deduplicated.
pub fn quantile_cuts(values: &[f64], q: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut cuts: Vec<f64> = (1..q).map(|p| sorted[(n * p).div_ceil(q) - 1]).collect();
    cuts.dedup();
    cuts
}

pub fn fit_quantile_grid(data: &Dataset, q: usize) -> Result<QuantileGrid> {
    if q < 2 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: format!("must be >= 2, got {q}"),
        });
    }
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    let cuts = data
        .features()
        .iter()
        .enumerate()
        .filter_map(|(f, col)| match &col.data {
            ColumnData::Continuous(v) => Some((f, quantile_cuts(v, q))),
            ColumnData::Categorical { .. } => None,
        })
        .collect();
    Ok(QuantileGrid {
        q,
        cuts,
        fitted_on: data.name().to_string(),
    })
}

impl QuantileGrid {
    pub fn cuts(&self, feature: usize) -> Result<&[f64]> {
        self.cuts
            .get(&feature)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownFeature { feature })
    }

    /// Number of bins actually available for `feature` after deduplication.
    pub fn effective_bins(&self, feature: usize) -> Result<usize> {
        Ok(self.cuts(feature)?.len() + 1)
    }

    pub fn bin_of(&self, feature: usize, v: f64) -> Result<Bin> {
        Ok(bin_in(self.cuts(feature)?, v))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }
}

/// Smallest `p` with `v <= cuts[p-1]`, else `cuts.len() + 1`.
fn bin_in(cuts: &[f64], v: f64) -> Bin {
    (cuts.partition_point(|&c| c < v) + 1) as Bin
}

pub fn bin_of(grid: &QuantileGrid, feature: usize, v: f64) -> Result<Bin> {
    grid.bin_of(feature, v)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinTest {
    Bins { lower: Bin, upper: Bin },
    MemberOf(BTreeSet<String>),
}

/// A rule reduced to its conditions on the quantile grid; predictions are
/// not part of its identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiscretizedRule {
    pub conditions: Vec<(usize, BinTest)>,
}

impl DiscretizedRule {
    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }
}

/// Replace interval boundaries by their bins: `(a, b]` becomes bins
/// `[bin_of(a), bin_of(b)]`, infinite ends mapping to the first and last bin.
pub fn discretize_rule(grid: &QuantileGrid, rule: &Rule) -> Result<DiscretizedRule> {
    let conditions = rule
        .conditions
        .iter()
        .map(|c| {
            let test = match &c.test {
                Test::Interval { lower, upper } => {
                    let cuts = grid.cuts(c.feature)?;
                    BinTest::Bins {
                        lower: bin_in(cuts, *lower),
                        upper: bin_in(cuts, *upper),
                    }
                }
                Test::MemberOf(set) => BinTest::MemberOf(set.clone()),
            };
            Ok((c.feature, test))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscretizedRule { conditions })
}

/// Discretize every rule; duplicates collapse.
pub fn discretize_ruleset(grid: &QuantileGrid, rs: &RuleSet) -> Result<BTreeSet<DiscretizedRule>> {
    rs.rules.iter().map(|r| discretize_rule(grid, r)).collect()
}
