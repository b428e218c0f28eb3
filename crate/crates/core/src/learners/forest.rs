use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow, DecisionTree, TreeParams};
use crate::dataset::TabularDataset;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub tree_count: usize,
    pub bootstrap: bool,
    /// Features considered per split; `None` means `ceil(sqrt(d))`.
    pub max_features: Option<usize>,
    pub tree: TreeParams,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            tree_count: 100,
            bootstrap: true,
            max_features: None,
            tree: TreeParams::default(),
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.tree_count == 0 {
            return Err(Error::Config("forest tree_count must be >= 1".into()));
        }
        if self.max_features == Some(0) {
            return Err(Error::Config("forest max_features must be >= 1".into()));
        }
        self.tree.validate()
    }

    pub fn features_per_split(&self, n_features: usize) -> usize {
        self.max_features
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features.max(1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    pub trees: Vec<DecisionTree>,
    pub n_features: usize,
}

impl RandomForest {
    /// Arithmetic mean of the member trees' leaf probabilities.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict_proba(x)).sum();
        sum / self.trees.len() as f64
    }
}

pub fn train_random_forest(
    ds: &TabularDataset,
    params: &ForestParams,
    seed: u64,
) -> Result<RandomForest> {
    if ds.is_empty() {
        return Err(Error::EmptyData);
    }
    params.validate()?;
    let m = params.features_per_split(ds.n_features());
    let n = ds.n_rows();
    let trees = (0..params.tree_count)
        .map(|t| {
            let mut rng = seed::rng(seed::derive(seed, t as u64));
            let rows: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(ds, rows, &params.tree, Some((&mut rng, m)))
        })
        .collect();
    Ok(RandomForest {
        trees,
        n_features: ds.n_features(),
    })
}
