//! Feature ranking strategies.
//!
//! Two selectors are provided: a filter that ranks features by information
//! gain over MDL-discretized values, and a wrapper that grows a feature set
//! greedily by cross-validated accuracy of a shallow tree. Both produce a
//! [`FeatureRanking`] whose prefix defines a subdataset.

pub mod entropy;
pub mod wrapper;

use serde::{Deserialize, Serialize};

use crate::dataset::TabularDataset;
use crate::error::{Error, Result};
use crate::learners::{Learner, LearnerSpec, ProjectedModel, TrainedModel};

pub use entropy::{discretize_mdl, entropy, information_gain, DiscretizationScheme};
pub use wrapper::{wrapper_subset_search, WrapperParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureScore {
    pub feature_index: usize,
    /// Information gain in bits, or internal CV accuracy for the wrapper.
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingMethod {
    InfoGain,
    Wrapper,
}

impl RankingMethod {
    pub fn label(&self) -> &'static str {
        match self {
            RankingMethod::InfoGain => "InfoGain",
            RankingMethod::Wrapper => "Wrapper",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingConfig {
    pub selector: SelectorSpec,
    pub top_k: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRanking {
    pub method: RankingMethod,
    pub ordered: Vec<FeatureScore>,
    pub selector_config: RankingConfig,
}

impl FeatureRanking {
    pub fn indices(&self) -> Vec<usize> {
        self.ordered.iter().map(|s| s.feature_index).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn check_top_k(top_k: usize, n_features: usize) -> Result<()> {
    if top_k == 0 || top_k > n_features {
        return Err(Error::TopKOutOfRange { top_k, n_features });
    }
    Ok(())
}

/// Ranks all features by information gain (descending, ties by ascending
/// index) and keeps the first `top_k`. Cut points are learned on `ds`.
pub fn rank_by_information_gain(ds: &TabularDataset, top_k: usize) -> Result<FeatureRanking> {
    check_top_k(top_k, ds.n_features())?;
    let scheme = DiscretizationScheme::fit_mdl(ds);
    let mut scores = (0..ds.n_features())
        .map(|j| {
            Ok(FeatureScore {
                feature_index: j,
                score: information_gain(ds, j, &scheme)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    scores.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.feature_index.cmp(&b.feature_index))
    });
    scores.truncate(top_k);
    Ok(FeatureRanking {
        method: RankingMethod::InfoGain,
        ordered: scores,
        selector_config: RankingConfig {
            selector: SelectorSpec::InfoGain,
            top_k,
            seed: 0,
        },
    })
}

/// A feature ranking strategy.
pub trait FeatureSelector: Send + Sync {
    fn name(&self) -> &str;
    fn rank(&self, ds: &TabularDataset, top_k: usize, seed: u64) -> Result<FeatureRanking>;
    fn spec(&self) -> SelectorSpec;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SelectorSpec {
    InfoGain,
    Wrapper(WrapperParams),
}

impl SelectorSpec {
    pub fn build(&self) -> Box<dyn FeatureSelector> {
        match self {
            SelectorSpec::InfoGain => Box::new(InfoGainSelector),
            SelectorSpec::Wrapper(p) => Box::new(*p),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct InfoGainSelector;

impl FeatureSelector for InfoGainSelector {
    fn name(&self) -> &str {
        "infogain"
    }
    fn rank(&self, ds: &TabularDataset, top_k: usize, _seed: u64) -> Result<FeatureRanking> {
        rank_by_information_gain(ds, top_k)
    }
    fn spec(&self) -> SelectorSpec {
        SelectorSpec::InfoGain
    }
}

impl FeatureSelector for WrapperParams {
    fn name(&self) -> &str {
        "wrapper"
    }
    fn rank(&self, ds: &TabularDataset, top_k: usize, seed: u64) -> Result<FeatureRanking> {
        wrapper_subset_search(ds, top_k, seed, self)
    }
    fn spec(&self) -> SelectorSpec {
        SelectorSpec::Wrapper(*self)
    }
}

/// Runs a selector on each training set, then trains the inner learner on
/// the selected columns. Used for leakage-free (strict) evaluation.
pub struct SelectedLearner {
    selector: Box<dyn FeatureSelector>,
    top_k: usize,
    inner: Box<dyn Learner>,
    name: String,
}

impl SelectedLearner {
    pub fn new(selector: Box<dyn FeatureSelector>, top_k: usize, inner: Box<dyn Learner>) -> Self {
        let name = format!("{}@{}{}", inner.name(), selector.name(), top_k);
        SelectedLearner {
            selector,
            top_k,
            inner,
            name,
        }
    }
}

impl Learner for SelectedLearner {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, ds: &TabularDataset, seed: u64) -> Result<TrainedModel> {
        let ranking =
            self.selector
                .rank(ds, self.top_k, crate::seed::derive_str(seed, "select"))?;
        let indices = ranking.indices();
        let projected = ds.project_features(&indices)?;
        let inner = self.inner.fit(&projected, seed)?;
        Ok(TrainedModel::Projected(ProjectedModel {
            n_features: ds.n_features(),
            indices,
            inner: Box::new(inner),
        }))
    }

    fn spec(&self) -> LearnerSpec {
        LearnerSpec::Selected {
            selector: self.selector.spec(),
            top_k: self.top_k,
            inner: Box::new(self.inner.spec()),
        }
    }
}
