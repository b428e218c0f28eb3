//! Greedy forward wrapper selection.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    check_top_k, FeatureRanking, FeatureScore, RankingConfig, RankingMethod, SelectorSpec,
};
use crate::dataset::{stratified_k_folds, TabularDataset};
use crate::error::Result;
use crate::learners::tree::{train_decision_tree, TreeParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WrapperParams {
    pub folds: usize,
    pub evaluator: TreeParams,
}

impl Default for WrapperParams {
    fn default() -> Self {
        WrapperParams {
            folds: 5,
            evaluator: TreeParams {
                max_depth: 5,
                min_leaf: 5,
            },
        }
    }
}

/// Mean internal-CV accuracy of the evaluator tree on `features`.
pub fn subset_accuracy(
    splits: &[(TabularDataset, TabularDataset)],
    features: &[usize],
    evaluator: &TreeParams,
) -> Result<f64> {
    let mut total = 0.0;
    for (train, test) in splits {
        let tree = train_decision_tree(&train.project_features(features)?, evaluator)?;
        let test = test.project_features(features)?;
        let correct = test
            .rows()
            .zip(test.labels())
            .filter(|(row, &y)| crate::learners::threshold(tree.predict_proba(row)) == y)
            .count();
        total += correct as f64 / test.n_rows() as f64;
    }
    Ok(total / splits.len() as f64)
}

/// Starting from the empty set, repeatedly adds the feature whose inclusion
/// gives the highest mean internal-CV accuracy (ties to the lowest index),
/// until `top_k` features are included. The internal folds are built once
/// from `seed` and shared by every candidate evaluation.
pub fn wrapper_subset_search(
    ds: &TabularDataset,
    top_k: usize,
    seed: u64,
    params: &WrapperParams,
) -> Result<FeatureRanking> {
    check_top_k(top_k, ds.n_features())?;
    params.evaluator.validate()?;
    let folds = stratified_k_folds(ds.labels(), params.folds, seed)?;
    let splits: Vec<(TabularDataset, TabularDataset)> = (0..folds.k())
        .map(|f| {
            (
                ds.subset_rows(&folds.train_rows(f)),
                ds.subset_rows(&folds.test_rows(f)),
            )
        })
        .collect();

    let mut selected: Vec<usize> = Vec::with_capacity(top_k);
    let mut ordered = Vec::with_capacity(top_k);
    for _ in 0..top_k {
        let candidates: Vec<usize> = (0..ds.n_features())
            .filter(|j| !selected.contains(j))
            .collect();
        let scores = candidates
            .par_iter()
            .map(|&j| {
                let mut subset = selected.clone();
                subset.push(j);
                subset_accuracy(&splits, &subset, &params.evaluator).map(|s| (j, s))
            })
            .collect::<Result<Vec<_>>>()?;
        // Candidates are in ascending index order; strict `>` keeps the lowest.
        let (best, score) =
            scores
                .into_iter()
                .fold((usize::MAX, f64::NEG_INFINITY), |acc, (j, s)| {
                    if s > acc.1 {
                        (j, s)
                    } else {
                        acc
                    }
                });
        selected.push(best);
        ordered.push(FeatureScore {
            feature_index: best,
            score,
        });
    }
    Ok(FeatureRanking {
        method: RankingMethod::Wrapper,
        ordered,
        selector_config: RankingConfig {
            selector: SelectorSpec::Wrapper(*params),
            top_k,
            seed,
        },
    })
}
