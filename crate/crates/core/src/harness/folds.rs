use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Assignment of rows to `k` folds whose sizes differ by at most one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        self.rows_where(|f| f == fold)
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        self.rows_where(|f| f != fold)
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    fn rows_where(&self, keep: impl Fn(usize) -> bool) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &f)| keep(f))
            .map(|(i, _)| i)
            .collect()
    }

    /// `row,fold` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,fold\n");
        for (row, fold) in self.assignments.iter().enumerate() {
            s.push_str(&format!("{row},{fold}\n"));
        }
        s
    }
}

/// Shuffle rows with a seeded generator and deal them round-robin into folds.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::BadK { n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        assignments[row] = pos % k;
    }
    Ok(FoldPlan { k, assignments, seed })
}

/// Random disjoint halves of sizes `floor(n/2)` and `ceil(n/2)`. Rows keep
/// their original relative order inside each half.
pub fn stability_split(train: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    let n = train.n();
    if n < 4 {
        return Err(Error::TooSmall(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (a, b) = order.split_at(n / 2);
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    let name = train.name();
    Ok((
        train.subset(&a).with_name(format!("{name}#half_a")),
        train.subset(&b).with_name(format!("{name}#half_b")),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Column, Targets};

    #[test]
    fn fold_sizes() {
        let p = kfold_split(10, 10, 1).unwrap();
        assert!(p.fold_sizes().iter().all(|&s| s == 1));
        let p = kfold_split(11, 10, 1).unwrap();
        let mut sizes = p.fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, [1, 1, 1, 1, 1, 1, 1, 1, 1, 2]);
        assert_eq!(kfold_split(11, 10, 1).unwrap(), p);
        assert!(matches!(kfold_split(5, 1, 0), Err(Error::BadK { .. })));
        assert!(matches!(kfold_split(5, 6, 0), Err(Error::BadK { .. })));
    }

    #[test]
    fn train_and_test_partition_rows() {
        let p = kfold_split(23, 4, 7).unwrap();
        for f in 0..4 {
            let mut all = p.train_rows(f);
            all.extend(p.test_rows(f));
            all.sort_unstable();
            assert_eq!(all, (0..23).collect::<Vec<_>>());
        }
    }

    fn rows(n: usize) -> Dataset {
        let x: Vec<f64> = (0..n).map(|i| i as f64).collect();
        Dataset::new("d", vec![Column::continuous("x", x.clone())], "y", Targets::Real(x)).unwrap()
    }

    #[test]
    fn halves() {
        let (a, b) = stability_split(&rows(100), 3).unwrap();
        assert_eq!((a.n(), b.n()), (50, 50));
        let (a, b) = stability_split(&rows(101), 3).unwrap();
        assert_eq!((a.n(), b.n()), (50, 51));
        let (a2, b2) = stability_split(&rows(101), 3).unwrap();
        assert_eq!((a, b), (a2, b2));
        assert!(matches!(stability_split(&rows(3), 0), Err(Error::TooSmall(3))));
    }
}
