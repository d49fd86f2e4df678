//! Evaluation protocol: data loading, fold plans, the half-split stability
//! protocol, score aggregation and report generation.

mod correlation;
mod csv_loader;
mod evaluate;
mod folds;
mod report;

pub use correlation::{pearson, score_correlations, CorrelationMatrix, SCORE_NAMES};
pub use csv_loader::{load_csv, CsvOptions};
pub use evaluate::{
    evaluate, AlgorithmSource, AlgorithmSpec, EvaluationConfig, FoldRules, ImportedRules, MeanRow,
    ScoreReport, ScoreRow,
};
pub use folds::{kfold_split, stability_split, FoldPlan};
pub use report::{write_report, REPORT_FILES};

use crate::rules::{read_rules, RuleSet};
use crate::error::Result;
use std::path::Path;

/// Read a rule-set JSON file; an alias of [`crate::rules::read_rules`].
pub fn import_rules(path: impl AsRef<Path>) -> Result<RuleSet> {
    read_rules(path)
}

/// Deterministic seed derivation: FNV-1a over the base seed and the
/// length-prefixed parts, finished with the SplitMix64 mixer. Stable across
/// platforms and releases.
pub fn derive_seed(base: u64, parts: &[&[u8]]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |bytes: &[u8]| {
        for b in bytes {
            h ^= u64::from(*b);
            h = h.wrapping_mul(PRIME);
        }
    };
    feed(&base.to_le_bytes());
    for p in parts {
        feed(&(p.len() as u64).to_le_bytes());
        feed(p);
    }
    let mut z = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
