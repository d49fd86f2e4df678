//! Predictivity, q-stability, simplicity and their weighted aggregate.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::data::{mean, mode, Dataset, Prediction, TaskKind};
use crate::discretize::{discretize_ruleset, fit_quantile_grid};
use crate::error::{Error, Result};
use crate::learners::Algorithm;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contrast {
    /// `(pred - target)^2`, regression only.
    Quadratic,
    /// `1[pred != target]`, classification only.
    ZeroOne,
}

impl Contrast {
    pub fn for_task(task: TaskKind) -> Self {
        match task {
            TaskKind::Regression => Contrast::Quadratic,
            TaskKind::Classification => Contrast::ZeroOne,
        }
    }

    fn task(self) -> TaskKind {
        match self {
            Contrast::Quadratic => TaskKind::Regression,
            Contrast::ZeroOne => TaskKind::Classification,
        }
    }
}

/// Convex weights of the interpretability score.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Weights {
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

impl Weights {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(alpha1: f64, alpha2: f64, alpha3: f64) -> Result<Self> {
        let all = [alpha1, alpha2, alpha3];
        let ok = all.iter().all(|a| a.is_finite() && *a >= 0.0)
            && (all.iter().sum::<f64>() - 1.0).abs() <= Self::SUM_TOLERANCE;
        if ok {
            Ok(Weights { alpha1, alpha2, alpha3 })
        } else {
            Err(Error::InvalidWeights(alpha1, alpha2, alpha3))
        }
    }

    /// Non-negative ratios scaled to sum to one, e.g. `(1, 1, 1)`.
    pub fn normalized(a: f64, b: f64, c: f64) -> Result<Self> {
        let sum = a + b + c;
        if !(sum.is_finite() && sum > 0.0) || [a, b, c].iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidWeights(a, b, c));
        }
        let (a, b) = (a / sum, b / sum);
        // Close the sum exactly on the last weight.
        let c = (1.0 - a - b).max(0.0);
        Weights::new(a, b, c)
    }

    pub fn equal() -> Self {
        Weights {
            alpha1: 1.0 / 3.0,
            alpha2: 1.0 / 3.0,
            alpha3: 1.0 / 3.0,
        }
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights::equal()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScoreTriple {
    pub predictivity: f64,
    pub stability: f64,
    pub simplicity: f64,
    pub interpretability: f64,
}

impl ScoreTriple {
    pub fn new(predictivity: f64, stability: f64, simplicity: f64, w: &Weights) -> Self {
        ScoreTriple {
            predictivity,
            stability,
            simplicity,
            interpretability: interpretability(predictivity, stability, simplicity, w),
        }
    }
}

pub fn empirical_risk(preds: &[Prediction], targets: &[Prediction], contrast: Contrast) -> Result<f64> {
    if preds.len() != targets.len() {
        return Err(Error::LengthMismatch {
            left: preds.len(),
            right: targets.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }
    let task = contrast.task();
    let mut total = 0.0;
    for (p, t) in preds.iter().zip(targets) {
        total += match (contrast, p, t) {
            (Contrast::Quadratic, Prediction::Real(p), Prediction::Real(t)) => (p - t) * (p - t),
            (Contrast::ZeroOne, Prediction::Class(p), Prediction::Class(t)) => f64::from(u8::from(p != t)),
            _ => return Err(Error::PredictionKind { task: task.as_str() }),
        };
    }
    Ok(total / preds.len() as f64)
}

/// Training-target mean (regression) or mode with smallest-class ties (classification).
pub fn baseline_prediction(train_targets: &[Prediction], task: TaskKind) -> Result<Prediction> {
    if train_targets.is_empty() {
        return Err(Error::EmptyInput);
    }
    let kind_err = || Error::PredictionKind { task: task.as_str() };
    match task {
        TaskKind::Regression => {
            let v = train_targets
                .iter()
                .map(|t| t.as_real().ok_or_else(kind_err))
                .collect::<Result<Vec<_>>>()?;
            Ok(Prediction::Real(mean(&v)))
        }
        TaskKind::Classification => {
            let labels = train_targets
                .iter()
                .map(|t| t.as_class().ok_or_else(kind_err))
                .collect::<Result<Vec<_>>>()?;
            Ok(Prediction::Class(mode(labels).expect("non-empty")))
        }
    }
}

/// `1 - model_risk / baseline_risk`; 0 when both risks are 0.
pub fn predictivity(model_risk: f64, baseline_risk: f64) -> Result<f64> {
    if model_risk < 0.0 || baseline_risk < 0.0 || model_risk.is_nan() || baseline_risk.is_nan() {
        return Err(Error::InvalidParameter {
            name: "risk",
            reason: format!("risks must be non-negative, got {model_risk} and {baseline_risk}"),
        });
    }
    if baseline_risk == 0.0 {
        return if model_risk == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::DegenerateBaseline { model_risk })
        };
    }
    Ok(1.0 - model_risk / baseline_risk)
}

/// `2|a ∩ b| / (|a| + |b|)`, with 0/0 taken as 0.
pub fn dice_sorensen<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let denom = a.len() + b.len();
    if denom == 0 {
        return 0.0;
    }
    let common = a.intersection(b).count();
    (2 * common) as f64 / denom as f64
}

/// Seed of the first (`half = 0`) or second (`half = 1`) fit of a stability pair.
pub fn half_fit_seed(seed: u64, half: u64) -> u64 {
    crate::harness::derive_seed(seed, &[b"half-fit", &half.to_le_bytes()])
}

/// Fit `alg` on `d1` and `d2`, discretize each rule set on a grid fitted to
/// its own sample and compare them with the Dice-Sorensen index. The two fits
/// run concurrently with seeds derived from `seed`.
pub fn q_stability(alg: &dyn Algorithm, d1: &Dataset, d2: &Dataset, q: usize, seed: u64) -> Result<f64> {
    if !d1.same_schema(d2) {
        return Err(Error::SchemaMismatch(format!(
            "stability samples '{}' and '{}' differ in schema",
            d1.name(),
            d2.name()
        )));
    }
    let side = |data: &Dataset, half: u64| -> Result<_> {
        let rs = alg.fit(data, half_fit_seed(seed, half))?.rule_set;
        let grid = fit_quantile_grid(data, q)?;
        discretize_ruleset(&grid, &rs)
    };
    let (a, b) = rayon::join(|| side(d1, 0), || side(d2, 1));
    Ok(dice_sorensen(&a?, &b?))
}

/// Relative simplicity: minimum positive interpretability index over the
/// algorithms divided by each algorithm's own index. Empty models (index 0)
/// score 0 and do not take part in the minimum.
pub fn simplicity_scores<K: Ord + Clone>(ints: &BTreeMap<K, usize>) -> Result<BTreeMap<K, f64>> {
    if ints.len() < 2 {
        return Err(Error::FewerThanTwoAlgorithms(ints.len()));
    }
    let min = ints
        .values()
        .copied()
        .filter(|&v| v > 0)
        .min()
        .ok_or(Error::AllEmpty)?;
    Ok(ints
        .iter()
        .map(|(k, &v)| {
            let s = if v == 0 { 0.0 } else { min as f64 / v as f64 };
            (k.clone(), s)
        })
        .collect())
}

/// `alpha1*max(pred, 0) + alpha2*stab + alpha3*simp`.
pub fn interpretability(pred: f64, stab: f64, simp: f64, w: &Weights) -> f64 {
    w.alpha1 * pred.max(0.0) + w.alpha2 * stab + w.alpha3 * simp
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reals(v: &[f64]) -> Vec<Prediction> {
        v.iter().map(|x| Prediction::Real(*x)).collect()
    }

    fn classes(v: &[&str]) -> Vec<Prediction> {
        v.iter().map(|x| Prediction::class(*x)).collect()
    }

    #[test]
    fn risks() {
        assert_eq!(empirical_risk(&reals(&[1.0, 2.0]), &reals(&[1.0, 4.0]), Contrast::Quadratic).unwrap(), 2.0);
        let t = classes(&["a", "b", "b"]);
        assert_eq!(empirical_risk(&t, &t, Contrast::ZeroOne).unwrap(), 0.0);
        let r = empirical_risk(&classes(&["a", "a", "b"]), &t, Contrast::ZeroOne).unwrap();
        assert_eq!(r, 1.0 / 3.0);
        assert!(matches!(
            empirical_risk(&reals(&[1.0]), &reals(&[1.0, 2.0]), Contrast::Quadratic),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(empirical_risk(&[], &[], Contrast::Quadratic), Err(Error::EmptyInput)));
        assert!(matches!(
            empirical_risk(&reals(&[1.0]), &reals(&[1.0]), Contrast::ZeroOne),
            Err(Error::PredictionKind { .. })
        ));
    }

    #[test]
    fn baselines() {
        assert_eq!(
            baseline_prediction(&reals(&[1.0, 2.0, 3.0]), TaskKind::Regression).unwrap(),
            Prediction::Real(2.0)
        );
        let c = classes(&["a", "a", "b"]);
        assert_eq!(baseline_prediction(&c, TaskKind::Classification).unwrap(), Prediction::class("a"));
        let tie = classes(&["b", "a"]);
        assert_eq!(baseline_prediction(&tie, TaskKind::Classification).unwrap(), Prediction::class("a"));
        assert!(matches!(baseline_prediction(&[], TaskKind::Regression), Err(Error::EmptyInput)));
    }

    #[test]
    fn predictivity_cases() {
        assert_eq!(predictivity(25.0, 100.0).unwrap(), 0.75);
        assert_eq!(predictivity(3.5, 3.5).unwrap(), 0.0);
        assert_eq!(predictivity(0.0, 7.0).unwrap(), 1.0);
        assert_eq!(predictivity(0.0, 0.0).unwrap(), 0.0);
        assert!(matches!(predictivity(1.0, 0.0), Err(Error::DegenerateBaseline { .. })));
        assert!(predictivity(200.0, 100.0).unwrap() < 0.0);
    }

    #[test]
    fn dice_cases() {
        let s = |v: &[u8]| v.iter().copied().collect::<BTreeSet<u8>>();
        assert_eq!(dice_sorensen(&s(&[1, 2]), &s(&[1, 2])), 1.0);
        assert_eq!(dice_sorensen(&s(&[1, 2, 3]), &s(&[1, 2, 4])), 2.0 / 3.0);
        assert_eq!(dice_sorensen(&s(&[]), &s(&[])), 0.0);
        assert_eq!(dice_sorensen(&s(&[1]), &s(&[2])), 0.0);
    }

    #[test]
    fn simplicity_cases() {
        let ints: BTreeMap<&str, usize> = [("RT", 50), ("CA", 6), ("SIRUS", 20)].into();
        let s = simplicity_scores(&ints).unwrap();
        assert_eq!(s["RT"], 6.0 / 50.0);
        assert_eq!(s["CA"], 1.0);
        assert_eq!(s["SIRUS"], 0.3);
        let tie: BTreeMap<&str, usize> = [("A", 7), ("B", 7)].into();
        assert!(simplicity_scores(&tie).unwrap().values().all(|&v| v == 1.0));
        let with_empty: BTreeMap<&str, usize> = [("A", 0), ("B", 4), ("C", 8)].into();
        let s = simplicity_scores(&with_empty).unwrap();
        assert_eq!((s["A"], s["B"], s["C"]), (0.0, 1.0, 0.5));
        let one: BTreeMap<&str, usize> = [("A", 3)].into();
        assert!(matches!(simplicity_scores(&one), Err(Error::FewerThanTwoAlgorithms(1))));
        let empty: BTreeMap<&str, usize> = [("A", 0), ("B", 0)].into();
        assert!(matches!(simplicity_scores(&empty), Err(Error::AllEmpty)));
    }

    #[test]
    fn weights_validation() {
        assert!(Weights::new(0.5, 0.5, 0.0).is_ok());
        assert!(matches!(Weights::new(0.5, 0.5, 0.5), Err(Error::InvalidWeights(..))));
        assert!(Weights::new(-0.1, 0.6, 0.5).is_err());
        let w = Weights::normalized(1.0, 1.0, 1.0).unwrap();
        assert!((w.alpha1 - 1.0 / 3.0).abs() < 1e-15 && (w.alpha3 - 1.0 / 3.0).abs() < 1e-15);
        let w = Weights::normalized(2.0, 1.0, 1.0).unwrap();
        assert_eq!(w.alpha1, 0.5);
        assert!(Weights::normalized(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn interpretability_clamps_negative_predictivity() {
        let w = Weights::equal();
        assert_eq!(interpretability(0.0, 0.0, 0.0, &w), 0.0);
        assert_eq!(interpretability(-3.0, 0.6, 0.3, &w), interpretability(0.0, 0.6, 0.3, &w));
        assert!((interpretability(0.6, 0.99, 0.29, &w) - 0.6267).abs() < 1e-4);
    }
}
