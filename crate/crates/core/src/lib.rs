//! Stacked-ensemble classification for binary tabular data.
//!
//! The crate covers the full pipeline used to screen diabetic retinopathy
//! from pre-extracted image features: loading and stratifying a dataset,
//! ranking features by information gain or wrapper search, training random
//! forest, perceptron and SVM base learners, combining them with a logistic
//! meta-classifier, and cross-validating the whole thing into report tables.
//!
//! Learners and selectors are strategies behind the [`Learner`] and
//! [`FeatureSelector`] traits and are looked up by name through
//! [`LearnerRegistry`] and [`SelectorRegistry`].

pub mod dataset;
pub mod ensemble;
pub mod error;
pub mod evaluation;
pub mod feature_selection;
pub mod learners;
pub mod persist;
pub mod registry;
pub mod seed;
pub mod synthetic;

pub use dataset::{
    load_csv, load_path, load_unlabeled, stratified_k_folds, ClassCounts, FoldAssignment,
    TabularDataset,
};
pub use ensemble::{train_stacking, StackedModel, Stacking, StackingSpec};
pub use error::{Error, Result};
pub use evaluation::{cross_validate, CvProtocol, CvResult};
pub use feature_selection::{
    rank_by_information_gain, wrapper_subset_search, FeatureRanking, FeatureSelector, SelectorSpec,
};
pub use learners::{Learner, LearnerSpec, TrainedModel};
pub use persist::ModelDocument;
pub use registry::{LearnerRegistry, SelectorRegistry};
