//! Repeated stratified k-fold cross-validation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{Metric, MetricsReport};
use crate::dataset::{stratified_k_folds, TabularDataset};
use crate::error::{Error, Result};
use crate::learners::{Learner, LearnerSpec};
use crate::seed;

/// How fold seeds vary across repeats.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeatSeeding {
    /// Repeat `r` uses `seed ^ r`.
    #[default]
    Xor,
    /// Every repeat uses `seed`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvProtocol {
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    #[serde(default)]
    pub seeding: RepeatSeeding,
}

impl CvProtocol {
    pub fn new(k: usize, repeats: usize, seed: u64) -> Self {
        CvProtocol {
            k,
            repeats,
            seed,
            seeding: RepeatSeeding::Xor,
        }
    }

    pub fn repeat_seed(&self, repeat: usize) -> u64 {
        match self.seeding {
            RepeatSeeding::Xor => self.seed ^ repeat as u64,
            RepeatSeeding::Fixed => self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetIdentity {
    pub source: String,
    pub n_rows: usize,
    pub n_features: usize,
    pub feature_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolRecord {
    pub protocol: CvProtocol,
    pub learner: LearnerSpec,
    pub dataset: DatasetIdentity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub repeat: usize,
    pub fold: usize,
    pub metrics: MetricsReport,
    /// Source row ids of the held-out rows.
    #[serde(skip)]
    pub test_rows: Vec<usize>,
}

/// Mean and sample standard deviation over the folds where a metric is defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
}

impl MetricSummary {
    /// Sums run over the values sorted ascending, so the result does not
    /// depend on the order folds finished in.
    pub fn from_values(values: &[Option<f64>]) -> Self {
        let mut v: Vec<f64> = values.iter().flatten().copied().collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let undefined = values.len() - n;
        if n == 0 {
            return MetricSummary {
                mean: None,
                std: None,
                defined: 0,
                undefined,
            };
        }
        let mean = v.iter().sum::<f64>() / n as f64;
        let std = (n > 1).then(|| {
            (v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        });
        MetricSummary {
            mean: Some(mean),
            std,
            defined: n,
            undefined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub record: ProtocolRecord,
    pub folds: Vec<FoldReport>,
}

impl CvResult {
    pub fn summary(&self, metric: Metric) -> MetricSummary {
        let values: Vec<Option<f64>> = self.folds.iter().map(|f| f.metrics.get(metric)).collect();
        MetricSummary::from_values(&values)
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.summary(metric).mean
    }

    /// Folds belonging to one repeat.
    pub fn repeat_block(&self, repeat: usize) -> Vec<&FoldReport> {
        self.folds.iter().filter(|f| f.repeat == repeat).collect()
    }
}

/// Cross-validates `learner` on `ds`. For every repeat, stratified folds are
/// built from the repeat seed; each fold's model is trained on the
/// complement only and scored on the held-out rows. Fold jobs run in
/// parallel; results are returned in (repeat, fold) order.
pub fn cross_validate(
    ds: &TabularDataset,
    learner: &dyn Learner,
    protocol: &CvProtocol,
) -> Result<CvResult> {
    if protocol.repeats == 0 {
        return Err(Error::Config("repeats must be >= 1".into()));
    }
    let assignments = (0..protocol.repeats)
        .map(|r| stratified_k_folds(ds.labels(), protocol.k, protocol.repeat_seed(r)))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..protocol.repeats)
        .flat_map(|r| (0..protocol.k).map(move |f| (r, f)))
        .collect();
    let folds = jobs
        .par_iter()
        .map(|&(repeat, fold)| {
            let folds = &assignments[repeat];
            let train = ds.subset_rows(&folds.train_rows(fold));
            let test = ds.subset_rows(&folds.test_rows(fold));
            let run = || -> Result<MetricsReport> {
                let model = learner.fit(
                    &train,
                    seed::derive(protocol.repeat_seed(repeat), fold as u64),
                )?;
                let scores = model.predict_proba_all(&test)?;
                MetricsReport::from_scores(&scores, test.labels())
            };
            let metrics = run().map_err(|e| Error::Fold {
                repeat,
                fold,
                source: Box::new(e),
            })?;
            Ok(FoldReport {
                repeat,
                fold,
                metrics,
                test_rows: test.row_ids().to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CvResult {
        record: ProtocolRecord {
            protocol: *protocol,
            learner: learner.spec(),
            dataset: DatasetIdentity {
                source: ds.provenance().source.clone(),
                n_rows: ds.n_rows(),
                n_features: ds.n_features(),
                feature_names: ds.feature_names().to_vec(),
            },
        },
        folds,
    })
}
