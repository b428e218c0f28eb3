//! Base classifiers and the strategy trait they share.
//!
//! Every algorithm is configured by a parameter record that implements
//! [`Learner`]; fitting produces a [`TrainedModel`], a closed enum so models
//! can be persisted and reloaded without a registry lookup.

pub mod forest;
pub mod logistic;
pub mod mlp;
pub mod platt;
pub mod standardize;
pub mod svm;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::dataset::TabularDataset;
use crate::ensemble::{StackedModel, StackingSpec};
use crate::error::{Error, Result};
use crate::feature_selection::{SelectedLearner, SelectorSpec};

pub use forest::{ForestParams, RandomForest};
pub use logistic::{LogisticModel, LogisticParams};
pub use mlp::{Mlp, MlpParams};
pub use svm::{KernelSpec, SvmModel, SvmParams};
pub use tree::{DecisionTree, TreeParams};

/// Probability at or above which the predicted label is 1.
pub const THRESHOLD: f64 = 0.5;

pub fn threshold(probability: f64) -> u8 {
    u8::from(probability >= THRESHOLD)
}

/// A trainable classification strategy.
pub trait Learner: Send + Sync {
    /// Registry name of the strategy (`"svm"`, `"nn"`, ...).
    fn name(&self) -> &str;

    fn fit(&self, ds: &TabularDataset, seed: u64) -> Result<TrainedModel>;

    /// Serializable description of this learner, used in manifests.
    fn spec(&self) -> LearnerSpec;
}

/// A model whose features are a fixed projection of the input columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedModel {
    pub n_features: usize,
    pub indices: Vec<usize>,
    pub inner: Box<TrainedModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrainedModel {
    Tree(DecisionTree),
    Forest(RandomForest),
    Mlp(Mlp),
    Svm(SvmModel),
    Logistic(LogisticModel),
    Stacked(Box<StackedModel>),
    Projected(ProjectedModel),
}

impl TrainedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            TrainedModel::Tree(_) => "tree",
            TrainedModel::Forest(_) => "forest",
            TrainedModel::Mlp(_) => "mlp",
            TrainedModel::Svm(_) => "svm",
            TrainedModel::Logistic(_) => "logistic",
            TrainedModel::Stacked(_) => "stacked",
            TrainedModel::Projected(_) => "projected",
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            TrainedModel::Tree(m) => m.n_features,
            TrainedModel::Forest(m) => m.n_features,
            TrainedModel::Mlp(m) => m.n_features,
            TrainedModel::Svm(m) => m.n_features,
            TrainedModel::Logistic(m) => m.n_features(),
            TrainedModel::Stacked(m) => m.n_features,
            TrainedModel::Projected(m) => m.n_features,
        }
    }

    /// Class-1 probability, always within `[0, 1]`.
    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                found: x.len(),
            });
        }
        let p = match self {
            TrainedModel::Tree(m) => m.predict_proba(x),
            TrainedModel::Forest(m) => m.predict_proba(x),
            TrainedModel::Mlp(m) => m.predict_proba(x),
            TrainedModel::Svm(m) => m.predict_proba(x),
            TrainedModel::Logistic(m) => m.predict_proba(x),
            TrainedModel::Stacked(m) => m.predict_proba(x)?,
            TrainedModel::Projected(m) => {
                let sub: Vec<f64> = m.indices.iter().map(|&j| x[j]).collect();
                m.inner.predict_proba(&sub)?
            }
        };
        Ok(p.clamp(0.0, 1.0))
    }

    pub fn predict(&self, x: &[f64]) -> Result<u8> {
        self.predict_proba(x).map(threshold)
    }

    pub fn predict_proba_all(&self, ds: &TabularDataset) -> Result<Vec<f64>> {
        ds.rows().map(|r| self.predict_proba(r)).collect()
    }
}

/// Serializable learner configuration, one variant per strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    Tree(TreeParams),
    Forest(ForestParams),
    Mlp(MlpParams),
    Svm(SvmParams),
    Logistic(LogisticParams),
    Stacking(StackingSpec),
    /// Feature selection run on each training set before the inner learner.
    Selected {
        selector: SelectorSpec,
        top_k: usize,
        inner: Box<LearnerSpec>,
    },
}

impl LearnerSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            LearnerSpec::Tree(p) => p.validate(),
            LearnerSpec::Forest(p) => p.validate(),
            LearnerSpec::Mlp(p) => p.validate(),
            LearnerSpec::Svm(p) => p.validate(),
            LearnerSpec::Logistic(p) => p.validate(),
            LearnerSpec::Stacking(s) => s.validate(),
            LearnerSpec::Selected { inner, top_k, .. } => {
                if *top_k == 0 {
                    return Err(Error::Config("selected top_k must be >= 1".into()));
                }
                inner.validate()
            }
        }
    }

    /// Instantiates the strategy behind this spec.
    pub fn build(&self) -> Result<Box<dyn Learner>> {
        self.validate()?;
        Ok(match self {
            LearnerSpec::Tree(p) => Box::new(*p),
            LearnerSpec::Forest(p) => Box::new(*p),
            LearnerSpec::Mlp(p) => Box::new(*p),
            LearnerSpec::Svm(p) => Box::new(*p),
            LearnerSpec::Logistic(p) => Box::new(*p),
            LearnerSpec::Stacking(s) => Box::new(s.build()?),
            LearnerSpec::Selected {
                selector,
                top_k,
                inner,
            } => Box::new(SelectedLearner::new(
                selector.build(),
                *top_k,
                inner.build()?,
            )),
        })
    }
}

impl Learner for TreeParams {
    fn name(&self) -> &str {
        "tree"
    }
    fn fit(&self, ds: &TabularDataset, _seed: u64) -> Result<TrainedModel> {
        tree::train_decision_tree(ds, self).map(TrainedModel::Tree)
    }
    fn spec(&self) -> LearnerSpec {
        LearnerSpec::Tree(*self)
    }
}

impl Learner for ForestParams {
    fn name(&self) -> &str {
        "rf"
    }
    fn fit(&self, ds: &TabularDataset, seed: u64) -> Result<TrainedModel> {
        forest::train_random_forest(ds, self, seed).map(TrainedModel::Forest)
    }
    fn spec(&self) -> LearnerSpec {
        LearnerSpec::Forest(*self)
    }
}

impl Learner for MlpParams {
    fn name(&self) -> &str {
        "nn"
    }
    fn fit(&self, ds: &TabularDataset, seed: u64) -> Result<TrainedModel> {
        mlp::train_mlp(ds, self, seed).map(TrainedModel::Mlp)
    }
    fn spec(&self) -> LearnerSpec {
        LearnerSpec::Mlp(*self)
    }
}

impl Learner for SvmParams {
    fn name(&self) -> &str {
        "svm"
    }
    fn fit(&self, ds: &TabularDataset, seed: u64) -> Result<TrainedModel> {
        svm::train_svm(ds, self, seed).map(TrainedModel::Svm)
    }
    fn spec(&self) -> LearnerSpec {
        LearnerSpec::Svm(*self)
    }
}

impl Learner for LogisticParams {
    fn name(&self) -> &str {
        "logistic"
    }
    fn fit(&self, ds: &TabularDataset, _seed: u64) -> Result<TrainedModel> {
        logistic::train_logistic(ds, self).map(TrainedModel::Logistic)
    }
    fn spec(&self) -> LearnerSpec {
        LearnerSpec::Logistic(*self)
    }
}
