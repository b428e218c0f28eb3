use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts with class 1 as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }
}

pub fn confusion_matrix(predictions: &[u8], labels: &[u8]) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: labels.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p == 1, y == 1) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// TP / (TP + FP); `None` when nothing was predicted positive.
pub fn precision(cm: &ConfusionMatrix) -> Option<f64> {
    ratio(cm.tp, cm.tp + cm.fp)
}

/// TP / (TP + FN); `None` when there are no positives.
pub fn recall(cm: &ConfusionMatrix) -> Option<f64> {
    ratio(cm.tp, cm.tp + cm.fn_)
}

/// (TP + TN) / total; `None` for an empty matrix.
pub fn accuracy(cm: &ConfusionMatrix) -> Option<f64> {
    ratio(cm.tp + cm.tn, cm.total())
}

/// Harmonic mean of precision and recall; `None` when either is undefined or
/// both are zero.
pub fn f_measure(cm: &ConfusionMatrix) -> Option<f64> {
    let (p, r) = (precision(cm)?, recall(cm)?);
    (p + r > 0.0).then(|| 2.0 * p * r / (p + r))
}

/// Mann-Whitney AUC: the probability that a random positive scores above a
/// random negative, ties counting one half. Computed from midranks.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    let pos = labels.iter().filter(|&&y| y == 1).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Sum of doubled midranks of the positives, kept in integers.
    let mut rank_sum2: u128 = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1; doubled midrank = i + j + 2.
        let mid2 = (i + j + 2) as u128;
        let tied_pos = order[i..=j].iter().filter(|&&k| labels[k] == 1).count() as u128;
        rank_sum2 += mid2 * tied_pos;
        i = j + 1;
    }
    let (p, n) = (pos as u128, neg as u128);
    let u2 = rank_sum2 - p * (p + 1);
    Ok(u2 as f64 / (2 * p * n) as f64)
}

/// Metrics for one evaluated fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub counts: ConfusionMatrix,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
    pub auc: Option<f64>,
}

impl MetricsReport {
    pub fn from_scores(scores: &[f64], labels: &[u8]) -> Result<Self> {
        let preds: Vec<u8> = scores
            .iter()
            .map(|&p| crate::learners::threshold(p))
            .collect();
        let counts = confusion_matrix(&preds, labels)?;
        Ok(MetricsReport {
            counts,
            accuracy: accuracy(&counts),
            precision: precision(&counts),
            recall: recall(&counts),
            f_measure: f_measure(&counts),
            auc: auc(scores, labels).ok(),
        })
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::FMeasure => self.f_measure,
            Metric::Auc => self.auc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    Precision,
    Recall,
    FMeasure,
    Auc,
}

impl Metric {
    pub const ALL: [Metric; 5] = [
        Metric::Accuracy,
        Metric::Precision,
        Metric::Recall,
        Metric::FMeasure,
        Metric::Auc,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Metric::Accuracy => "Accuracy",
            Metric::Precision => "Precision",
            Metric::Recall => "Recall",
            Metric::FMeasure => "F-Measure",
            Metric::Auc => "AUC",
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::FMeasure => "f_measure",
            Metric::Auc => "auc",
        }
    }
}
