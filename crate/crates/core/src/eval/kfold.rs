//! Seeded k-fold splits with one development fold and one test fold per
//! round; the remaining folds are training data.

use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub dev: Vec<usize>,
    pub test: Vec<usize>,
}

/// Round `i` tests on chunk `i` and tunes on chunk `i + 1 (mod k)`.
pub fn kfold_splits(n: usize, k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 3 {
        return Err(Error::InvalidConfig("k-fold needs at least 3 folds".into()));
    }
    if n < k {
        return Err(Error::InvalidConfig(alloc::format!(
            "cannot split {n} items into {k} folds"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seed::rng(seed::derive(seed, 0xF01D)));
    let chunks: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            let start = i * n / k;
            let end = (i + 1) * n / k;
            let mut c = order[start..end].to_vec();
            c.sort_unstable();
            c
        })
        .collect();
    Ok((0..k)
        .map(|i| {
            let dev_idx = (i + 1) % k;
            let mut train: Vec<usize> = (0..k)
                .filter(|&j| j != i && j != dev_idx)
                .flat_map(|j| chunks[j].iter().copied())
                .collect();
            train.sort_unstable();
            Fold {
                train,
                dev: chunks[dev_idx].clone(),
                test: chunks[i].clone(),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_fold_partitions() {
        let folds = kfold_splits(103, 10, 4).unwrap();
        assert_eq!(folds.len(), 10);
        for f in &folds {
            let mut all: Vec<usize> = f
                .train
                .iter()
                .chain(&f.dev)
                .chain(&f.test)
                .copied()
                .collect();
            all.sort_unstable();
            assert_eq!(all, (0..103).collect::<Vec<_>>());
            assert!(f.test.len() == 10 || f.test.len() == 11);
        }
        let mut tests: Vec<usize> = folds.iter().flat_map(|f| f.test.iter().copied()).collect();
        tests.sort_unstable();
        assert_eq!(tests, (0..103).collect::<Vec<_>>());
        assert_eq!(folds, kfold_splits(103, 10, 4).unwrap());
    }

    #[test]
    fn invalid_splits() {
        assert!(kfold_splits(10, 2, 0).is_err());
        assert!(kfold_splits(2, 3, 0).is_err());
    }
}
