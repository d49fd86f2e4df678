use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::correlation::{score_correlations, CorrelationMatrix};
use super::derive_seed;
use super::folds::{kfold_split, stability_split};
use crate::data::Dataset;
use crate::discretize::{discretize_ruleset, fit_quantile_grid, DEFAULT_Q};
use crate::error::{Error, Result};
use crate::learners::{predict_dataset, Algorithm};
use crate::rules::{read_rules, RuleSet};
use crate::scores::{
    baseline_prediction, dice_sorensen, empirical_risk, interpretability, predictivity, q_stability,
    simplicity_scores, Contrast, Weights,
};

/// Rule sets supplied for one fold by an external tool.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldRules {
    pub model: RuleSet,
    /// Fits on the two stability halves, when available.
    pub halves: Option<(RuleSet, RuleSet)>,
}

/// Rule sets produced outside the harness. They cannot be refit.
#[derive(Clone, Debug)]
pub enum ImportedRules {
    /// One rule set scored on every fold; stability is unavailable.
    Fixed(RuleSet),
    /// A directory holding `fold{i}.json` and optionally `fold{i}_half_a.json`
    /// and `fold{i}_half_b.json` (0-based fold index), either directly or in a
    /// subdirectory named after the dataset.
    Directory(PathBuf),
}

impl ImportedRules {
    /// A directory path gives [`ImportedRules::Directory`], a file a fixed rule set.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if path.is_dir() {
            Ok(ImportedRules::Directory(path.to_path_buf()))
        } else {
            Ok(ImportedRules::Fixed(read_rules(path)?))
        }
    }

    pub fn for_fold(&self, dataset: &str, fold: usize) -> Result<FoldRules> {
        match self {
            ImportedRules::Fixed(rs) => Ok(FoldRules {
                model: rs.clone(),
                halves: None,
            }),
            ImportedRules::Directory(root) => {
                let per_dataset = root.join(dataset);
                let dir = if per_dataset.is_dir() { per_dataset } else { root.clone() };
                let model = read_rules(dir.join(format!("fold{fold}.json")))?;
                let a = dir.join(format!("fold{fold}_half_a.json"));
                let b = dir.join(format!("fold{fold}_half_b.json"));
                let halves = if a.is_file() && b.is_file() {
                    Some((read_rules(a)?, read_rules(b)?))
                } else {
                    None
                };
                Ok(FoldRules { model, halves })
            }
        }
    }
}

#[derive(Clone)]
pub enum AlgorithmSource {
    Builtin(Arc<dyn Algorithm>),
    Imported(ImportedRules),
}

#[derive(Clone)]
pub struct AlgorithmSpec {
    pub id: String,
    pub source: AlgorithmSource,
}

impl AlgorithmSpec {
    pub fn builtin<A: Algorithm + 'static>(alg: A) -> Self {
        AlgorithmSpec {
            id: alg.id().to_string(),
            source: AlgorithmSource::Builtin(Arc::new(alg)),
        }
    }

    pub fn imported(id: impl Into<String>, rules: ImportedRules) -> Self {
        AlgorithmSpec {
            id: id.into(),
            source: AlgorithmSource::Imported(rules),
        }
    }
}

#[derive(Clone)]
pub struct EvaluationConfig {
    pub k: usize,
    pub q: usize,
    pub weights: Weights,
    pub seed: u64,
    pub algorithms: Vec<AlgorithmSpec>,
}

impl EvaluationConfig {
    pub fn new(algorithms: Vec<AlgorithmSpec>) -> Self {
        EvaluationConfig {
            k: 10,
            q: DEFAULT_Q,
            weights: Weights::equal(),
            seed: 0,
            algorithms,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.algorithms.len() < 2 {
            return Err(Error::FewerThanTwoAlgorithms(self.algorithms.len()));
        }
        let mut ids: Vec<&str> = self.algorithms.iter().map(|a| a.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter {
                name: "algorithms",
                reason: format!("duplicate algorithm id '{}'", w[0]),
            });
        }
        if self.q < 2 {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: format!("must be >= 2, got {}", self.q),
            });
        }
        if self.k < 2 {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("must be >= 2, got {}", self.k),
            });
        }
        Weights::new(self.weights.alpha1, self.weights.alpha2, self.weights.alpha3)?;
        Ok(())
    }
}

/// Scores of one algorithm on one fold. `None` marks an unavailable score.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreRow {
    pub dataset: String,
    pub algorithm: String,
    pub fold: usize,
    pub int_index: Option<usize>,
    pub predictivity: Option<f64>,
    pub stability: Option<f64>,
    pub simplicity: Option<f64>,
    pub interpretability: Option<f64>,
    pub status: String,
}

/// Per-fold scores averaged over the folds where each score is available.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanRow {
    pub dataset: String,
    pub algorithm: String,
    pub folds_ok: usize,
    pub predictivity: Option<f64>,
    pub stability: Option<f64>,
    pub simplicity: Option<f64>,
    pub interpretability: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScoreReport {
    pub k: usize,
    pub q: usize,
    pub seed: u64,
    pub weights: Weights,
    pub datasets: Vec<String>,
    pub algorithms: Vec<String>,
    pub per_fold: Vec<ScoreRow>,
    pub means: Vec<MeanRow>,
    /// Over every per-fold row with all three scores, across datasets.
    pub correlations: Option<CorrelationMatrix>,
    pub correlation_rows: usize,
    pub warnings: Vec<String>,
}

struct FoldContext<'a> {
    dataset: &'a Dataset,
    fold: usize,
    train: Dataset,
    test: Dataset,
    halves: Option<(Dataset, Dataset)>,
    stability_seed: u64,
}

#[derive(Default)]
struct UnitResult {
    int_index: Option<usize>,
    predictivity: Option<f64>,
    stability: Option<f64>,
    warnings: Vec<String>,
}

fn test_predictivity(rs: &RuleSet, train: &Dataset, test: &Dataset) -> Result<f64> {
    let contrast = Contrast::for_task(test.task());
    let targets = test.targets().to_predictions();
    let baseline = baseline_prediction(&train.targets().to_predictions(), train.task())?;
    let baseline_risk = empirical_risk(&vec![baseline; targets.len()], &targets, contrast)?;
    let model_risk = empirical_risk(&predict_dataset(rs, test)?, &targets, contrast)?;
    predictivity(model_risk, baseline_risk)
}

fn score_unit(ctx: &FoldContext<'_>, spec: &AlgorithmSpec, cfg: &EvaluationConfig) -> Result<UnitResult> {
    let mut out = UnitResult::default();
    let schema = ctx.dataset.schema();
    let model = match &spec.source {
        AlgorithmSource::Builtin(alg) => {
            let seed = derive_seed(
                cfg.seed,
                &[b"fit", ctx.dataset.name().as_bytes(), &(ctx.fold as u64).to_le_bytes(), spec.id.as_bytes()],
            );
            let fitted = alg.fit(&ctx.train, seed)?;
            out.warnings.extend(fitted.warnings);
            if let Some((a, b)) = &ctx.halves {
                let seed = derive_seed(ctx.stability_seed, &[spec.id.as_bytes()]);
                out.stability = Some(q_stability(alg.as_ref(), a, b, cfg.q, seed)?);
            }
            fitted.rule_set
        }
        AlgorithmSource::Imported(imported) => {
            let fold_rules = imported.for_fold(ctx.dataset.name(), ctx.fold)?;
            match (&fold_rules.halves, &ctx.halves) {
                (Some((ra, rb)), Some((da, db))) => {
                    let a = discretize_ruleset(&fit_quantile_grid(da, cfg.q)?, &ra.canonicalized_in(&schema)?)?;
                    let b = discretize_ruleset(&fit_quantile_grid(db, cfg.q)?, &rb.canonicalized_in(&schema)?)?;
                    out.stability = Some(dice_sorensen(&a, &b));
                }
                _ => out.warnings.push(format!(
                    "{}: stability unavailable for imported rules '{}' on fold {}",
                    ctx.dataset.name(),
                    spec.id,
                    ctx.fold
                )),
            }
            fold_rules.model.canonicalized_in(&schema)?
        }
    };
    if model.task != ctx.dataset.task() {
        return Err(Error::PredictionKind {
            task: ctx.dataset.task().as_str(),
        });
    }
    out.int_index = Some(model.interpretability_index());
    out.predictivity = Some(test_predictivity(&model, &ctx.train, &ctx.test)?);
    Ok(out)
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Run the full protocol: k-fold cross-validation per dataset, the
/// half-split stability protocol inside each training fold, per-fold
/// relative simplicity, the weighted interpretability score, means and
/// score correlations. Algorithm failures are recorded per row and
/// excluded from the aggregates.
pub fn evaluate(datasets: &[Dataset], cfg: &EvaluationConfig) -> Result<ScoreReport> {
    cfg.validate()?;
    let mut names: Vec<&str> = datasets.iter().map(Dataset::name).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidParameter {
            name: "datasets",
            reason: format!("duplicate dataset name '{}'", w[0]),
        });
    }

    let mut warnings = Vec::new();
    let mut contexts = Vec::new();
    for ds in datasets {
        let id = ds.name().as_bytes();
        let plan = kfold_split(ds.n(), cfg.k, derive_seed(cfg.seed, &[b"folds", id]))?;
        for fold in 0..cfg.k {
            let train = ds.subset(&plan.train_rows(fold));
            let test = ds.subset(&plan.test_rows(fold));
            let stability_seed = derive_seed(cfg.seed, &[b"stability", id, &(fold as u64).to_le_bytes()]);
            let halves = match stability_split(&train, stability_seed) {
                Ok(h) => Some(h),
                Err(e) => {
                    warnings.push(format!("{}: fold {fold}: stability unavailable: {e}", ds.name()));
                    None
                }
            };
            contexts.push(FoldContext {
                dataset: ds,
                fold,
                train,
                test,
                halves,
                stability_seed,
            });
        }
    }

    let units: Vec<(usize, usize)> = (0..contexts.len())
        .flat_map(|c| (0..cfg.algorithms.len()).map(move |a| (c, a)))
        .collect();
    let results: Vec<Result<UnitResult>> = units
        .par_iter()
        .map(|&(c, a)| score_unit(&contexts[c], &cfg.algorithms[a], cfg))
        .collect();

    let mut per_fold = Vec::with_capacity(units.len());
    for (ctx_idx, ctx) in contexts.iter().enumerate() {
        let base = ctx_idx * cfg.algorithms.len();
        let mut rows: Vec<ScoreRow> = Vec::with_capacity(cfg.algorithms.len());
        let mut ints: BTreeMap<usize, usize> = BTreeMap::new();
        for (a, spec) in cfg.algorithms.iter().enumerate() {
            let mut row = ScoreRow {
                dataset: ctx.dataset.name().to_string(),
                algorithm: spec.id.clone(),
                fold: ctx.fold,
                int_index: None,
                predictivity: None,
                stability: None,
                simplicity: None,
                interpretability: None,
                status: "ok".into(),
            };
            match &results[base + a] {
                Ok(u) => {
                    row.int_index = u.int_index;
                    row.predictivity = u.predictivity;
                    row.stability = u.stability;
                    warnings.extend(u.warnings.iter().cloned());
                    if let Some(i) = u.int_index {
                        ints.insert(a, i);
                    }
                }
                Err(e) => {
                    row.status = format!("failed: {e}");
                    warnings.push(format!(
                        "{}: fold {}: algorithm '{}' failed and is excluded: {e}",
                        ctx.dataset.name(),
                        ctx.fold,
                        spec.id
                    ));
                }
            }
            rows.push(row);
        }
        match simplicity_scores(&ints) {
            Ok(simp) => {
                for (a, s) in simp {
                    rows[a].simplicity = Some(s);
                }
            }
            Err(e) => warnings.push(format!(
                "{}: fold {}: simplicity unavailable: {e}",
                ctx.dataset.name(),
                ctx.fold
            )),
        }
        for row in &mut rows {
            if let (Some(p), Some(st), Some(si)) = (row.predictivity, row.stability, row.simplicity) {
                row.interpretability = Some(interpretability(p, st, si, &cfg.weights));
            }
        }
        per_fold.extend(rows);
    }

    let mut means = Vec::new();
    for ds in datasets {
        for spec in &cfg.algorithms {
            let rows: Vec<&ScoreRow> = per_fold
                .iter()
                .filter(|r| r.dataset == ds.name() && r.algorithm == spec.id)
                .collect();
            means.push(MeanRow {
                dataset: ds.name().to_string(),
                algorithm: spec.id.clone(),
                folds_ok: rows.iter().filter(|r| r.status == "ok").count(),
                predictivity: mean_of(rows.iter().map(|r| r.predictivity)),
                stability: mean_of(rows.iter().map(|r| r.stability)),
                simplicity: mean_of(rows.iter().map(|r| r.simplicity)),
                interpretability: mean_of(rows.iter().map(|r| r.interpretability)),
            });
        }
    }

    let complete: Vec<[f64; 3]> = per_fold
        .iter()
        .filter_map(|r| Some([r.predictivity?, r.stability?, r.simplicity?]))
        .collect();
    let correlations = match score_correlations(&complete) {
        Ok(m) => Some(m),
        Err(e) => {
            warnings.push(format!("correlations unavailable: {e}"));
            None
        }
    };

    Ok(ScoreReport {
        k: cfg.k,
        q: cfg.q,
        seed: cfg.seed,
        weights: cfg.weights,
        datasets: datasets.iter().map(|d| d.name().to_string()).collect(),
        algorithms: cfg.algorithms.iter().map(|a| a.id.clone()).collect(),
        per_fold,
        means,
        correlation_rows: complete.len(),
        correlations,
        warnings,
    })
}
