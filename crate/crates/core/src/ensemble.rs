//! Stacked generalization.
//!
//! Base learners are scored out-of-fold on internal stratified folds of the
//! training data; the resulting `n_rows x n_bases` probability matrix trains
//! the meta learner. Base learners are then refit on all training rows.
//!
//! Seeds for each base learner derive from its name and occurrence count,
//! not its position, so permuting the base list permutes the meta inputs and
//! nothing else.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{stratified_k_folds, FoldAssignment, TabularDataset};
use crate::error::{Error, Result};
use crate::learners::{
    ForestParams, Learner, LearnerSpec, LogisticParams, MlpParams, SvmParams, TrainedModel,
};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StackingSpec {
    pub base_specs: Vec<LearnerSpec>,
    pub meta_spec: Box<LearnerSpec>,
    pub internal_folds: usize,
    /// Seed used by [`train_stacking`]; `Learner::fit` takes its seed from the caller.
    pub seed: u64,
}

impl Default for StackingSpec {
    fn default() -> Self {
        StackingSpec {
            base_specs: vec![
                LearnerSpec::Forest(ForestParams::default()),
                LearnerSpec::Mlp(MlpParams::default()),
                LearnerSpec::Svm(SvmParams::default()),
            ],
            meta_spec: Box::new(LearnerSpec::Logistic(LogisticParams::default())),
            internal_folds: 5,
            seed: 0,
        }
    }
}

impl StackingSpec {
    pub fn validate(&self) -> Result<()> {
        if self.base_specs.is_empty() {
            return Err(Error::Config(
                "stacking needs at least one base learner".into(),
            ));
        }
        if self.internal_folds < 2 {
            return Err(Error::Config("stacking internal_folds must be >= 2".into()));
        }
        for b in &self.base_specs {
            b.validate()?;
        }
        self.meta_spec.validate()
    }

    pub fn build(&self) -> Result<Stacking> {
        self.validate()?;
        let bases = self
            .base_specs
            .iter()
            .map(LearnerSpec::build)
            .collect::<Result<Vec<_>>>()?;
        Ok(Stacking::new(
            bases,
            self.meta_spec.build()?,
            self.internal_folds,
        ))
    }
}

/// Runtime stacking strategy over arbitrary learners.
pub struct Stacking {
    bases: Vec<Box<dyn Learner>>,
    meta: Box<dyn Learner>,
    internal_folds: usize,
    base_names: Vec<String>,
}

/// Bookkeeping from one stacking fit.
#[derive(Debug, Clone)]
pub struct StackingReport {
    pub folds: FoldAssignment,
    /// Out-of-fold probabilities, `meta_features[row][base]`.
    pub meta_features: Vec<Vec<f64>>,
}

impl Stacking {
    pub fn new(
        bases: Vec<Box<dyn Learner>>,
        meta: Box<dyn Learner>,
        internal_folds: usize,
    ) -> Self {
        let mut seen: HashMap<String, usize> = HashMap::new();
        let base_names = bases
            .iter()
            .map(|b| {
                let n = seen.entry(b.name().to_string()).or_default();
                *n += 1;
                if *n == 1 {
                    b.name().to_string()
                } else {
                    format!("{}#{}", b.name(), n)
                }
            })
            .collect();
        Stacking {
            bases,
            meta,
            internal_folds,
            base_names,
        }
    }

    pub fn base_names(&self) -> &[String] {
        &self.base_names
    }

    fn base_seed(&self, seed: u64, b: usize) -> u64 {
        seed::derive_str(seed, &self.base_names[b])
    }

    pub fn fit_with_report(
        &self,
        ds: &TabularDataset,
        seed: u64,
    ) -> Result<(StackedModel, StackingReport)> {
        if ds.is_empty() {
            return Err(Error::EmptyData);
        }
        if self.bases.is_empty() {
            return Err(Error::Config(
                "stacking needs at least one base learner".into(),
            ));
        }
        let folds = stratified_k_folds(
            ds.labels(),
            self.internal_folds,
            seed::derive_str(seed, "stack-folds"),
        )?;
        let n_bases = self.bases.len();
        let wrap = |b: usize, e: Error| Error::BaseLearner {
            index: b,
            name: self.base_names[b].clone(),
            source: Box::new(e),
        };

        let jobs: Vec<(usize, usize)> = (0..n_bases)
            .flat_map(|b| (0..folds.k()).map(move |f| (b, f)))
            .collect();
        let oof_parts = jobs
            .par_iter()
            .map(|&(b, f)| {
                let train = ds.subset_rows(&folds.train_rows(f));
                let model = self.bases[b]
                    .fit(&train, seed::derive(self.base_seed(seed, b), f as u64 + 1))
                    .map_err(|e| wrap(b, e))?;
                let test_rows = folds.test_rows(f);
                let probs = test_rows
                    .iter()
                    .map(|&r| model.predict_proba(ds.row(r)))
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| wrap(b, e))?;
                Ok((b, test_rows, probs))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut meta_features = vec![vec![0.0; n_bases]; ds.n_rows()];
        for (b, rows, probs) in oof_parts {
            for (r, p) in rows.into_iter().zip(probs) {
                meta_features[r][b] = p;
            }
        }
        let meta_ds = TabularDataset::from_rows(
            meta_features.clone(),
            ds.labels().to_vec(),
            self.base_names.clone(),
        )?;
        let meta = self.meta.fit(&meta_ds, seed::derive_str(seed, "meta"))?;

        let bases = (0..n_bases)
            .into_par_iter()
            .map(|b| {
                self.bases[b]
                    .fit(ds, self.base_seed(seed, b))
                    .map_err(|e| wrap(b, e))
            })
            .collect::<Result<Vec<_>>>()?;

        Ok((
            StackedModel {
                n_features: ds.n_features(),
                base_names: self.base_names.clone(),
                bases,
                meta,
            },
            StackingReport {
                folds,
                meta_features,
            },
        ))
    }
}

impl Learner for Stacking {
    fn name(&self) -> &str {
        "stack"
    }

    fn fit(&self, ds: &TabularDataset, seed: u64) -> Result<TrainedModel> {
        self.fit_with_report(ds, seed)
            .map(|(m, _)| TrainedModel::Stacked(Box::new(m)))
    }

    fn spec(&self) -> LearnerSpec {
        LearnerSpec::Stacking(StackingSpec {
            base_specs: self.bases.iter().map(|b| b.spec()).collect(),
            meta_spec: Box::new(self.meta.spec()),
            internal_folds: self.internal_folds,
            seed: 0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedModel {
    pub n_features: usize,
    pub base_names: Vec<String>,
    pub bases: Vec<TrainedModel>,
    pub meta: TrainedModel,
}

impl StackedModel {
    pub fn base_probabilities(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.bases.iter().map(|b| b.predict_proba(x)).collect()
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        self.meta.predict_proba(&self.base_probabilities(x)?)
    }

    /// Label and probability.
    pub fn predict(&self, x: &[f64]) -> Result<(u8, f64)> {
        let p = self.predict_proba(x)?;
        Ok((crate::learners::threshold(p), p))
    }
}

/// Trains the stacked ensemble described by `spec` with `spec.seed`.
pub fn train_stacking(ds: &TabularDataset, spec: &StackingSpec) -> Result<StackedModel> {
    spec.build()?.fit_with_report(ds, spec.seed).map(|(m, _)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::TreeParams;

    #[test]
    fn zero_bases_rejected() {
        let spec = StackingSpec {
            base_specs: vec![],
            ..Default::default()
        };
        assert!(matches!(spec.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_base_names_are_numbered() {
        let s = Stacking::new(
            vec![
                Box::new(TreeParams::default()),
                Box::new(TreeParams::default()),
            ],
            Box::new(LogisticParams::default()),
            2,
        );
        assert_eq!(s.base_names(), ["tree", "tree#2"]);
    }

    #[test]
    fn default_spec_is_forest_mlp_svm_under_logistic() {
        let s = StackingSpec::default().build().unwrap();
        assert_eq!(s.base_names(), ["rf", "nn", "svm"]);
        assert_eq!(s.spec(), LearnerSpec::Stacking(StackingSpec::default()));
    }

    #[test]
    fn base_failure_names_the_learner() {
        let ds = TabularDataset::from_rows(
            (0..10).map(|i| vec![i as f64]).collect(),
            (0..10).map(|i| (i % 2) as u8).collect(),
            vec!["x".into()],
        )
        .unwrap();
        let bad = MlpParams {
            learning_rate: f64::MAX,
            momentum: 0.0,
            epochs: 30,
            ..Default::default()
        };
        let s = Stacking::new(
            vec![Box::new(TreeParams::default()), Box::new(bad)],
            Box::new(LogisticParams::default()),
            2,
        );
        match s.fit(&ds, 0) {
            Err(Error::BaseLearner { index, name, .. }) => {
                assert_eq!((index, name.as_str()), (1, "nn"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
