//! Interpretability scoring for rule-based and tree-based models.
//!
//! A model's interpretability is scored as a weighted sum of three terms:
//! predictivity (risk relative to a naive baseline), q-stability
//! (Dice-Sorensen overlap of quantile-discretized rule sets fitted on two
//! independent samples) and simplicity (the smallest interpretability index
//! among the compared algorithms divided by the model's own).
//!
//! - [`rules`]: rule representation, canonical form, tree-to-rule conversion,
//!   the interpretability index and the JSON interchange format.
//! - [`discretize`]: empirical quantile grids and discretized rules.
//! - [`scores`]: the component scores and their weighted combination.
//! - [`learners`]: built-in CART and SIRUS-lite rule generators.
//! - [`harness`]: CSV loading, cross-validation, the stability protocol and reports.
//! - [`cli`]: the `rulescore` command line.

pub mod cli;
pub mod data;
pub mod discretize;
pub mod error;
pub mod harness;
pub mod learners;
pub mod rules;
pub mod scores;

pub use data::{ClassLabel, Column, Dataset, Prediction, TaskKind, Targets};
pub use error::{Error, Result};
