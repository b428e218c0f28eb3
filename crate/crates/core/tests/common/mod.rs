//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use drstack::learners::mlp::loss_and_gradient;
use drstack::TabularDataset;

/// Metrics recomputed by walking explicit prediction/label vectors.
pub struct HandMetrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub accuracy: Option<f64>,
    pub f_measure: Option<f64>,
}

pub fn expand(tp: usize, fp: usize, tn: usize, fn_: usize) -> (Vec<u8>, Vec<u8>) {
    let mut preds = Vec::new();
    let mut labels = Vec::new();
    for (p, y, c) in [(1, 1, tp), (1, 0, fp), (0, 0, tn), (0, 1, fn_)] {
        preds.extend(std::iter::repeat(p).take(c));
        labels.extend(std::iter::repeat(y).take(c));
    }
    (preds, labels)
}

pub fn hand_metrics(preds: &[u8], labels: &[u8]) -> HandMetrics {
    let predicted_pos: Vec<bool> = preds
        .iter()
        .zip(labels)
        .filter(|(p, _)| **p == 1)
        .map(|(_, y)| *y == 1)
        .collect();
    let actual_pos: Vec<bool> = preds
        .iter()
        .zip(labels)
        .filter(|(_, y)| **y == 1)
        .map(|(p, _)| *p == 1)
        .collect();
    let frac = |v: &[bool]| {
        (!v.is_empty()).then(|| v.iter().filter(|b| **b).count() as f64 / v.len() as f64)
    };
    let agree: Vec<bool> = preds.iter().zip(labels).map(|(p, y)| p == y).collect();
    let precision = frac(&predicted_pos);
    let recall = frac(&actual_pos);
    let tp = predicted_pos.iter().filter(|b| **b).count();
    let f_measure = match (precision, recall) {
        (Some(_), Some(_)) if tp > 0 => {
            let fp = predicted_pos.len() - tp;
            let fn_ = actual_pos.len() - tp;
            Some(2.0 * tp as f64 / (2 * tp + fp + fn_) as f64)
        }
        _ => None,
    };
    HandMetrics {
        precision,
        recall,
        accuracy: frac(&agree),
        f_measure,
    }
}

/// Pairwise concordance over every (positive, negative) pair.
pub fn brute_auc(scores: &[f64], labels: &[u8]) -> Option<f64> {
    let mut num = 0.0;
    let mut pairs = 0usize;
    for (i, &yi) in labels.iter().enumerate() {
        if yi != 1 {
            continue;
        }
        for (j, &yj) in labels.iter().enumerate() {
            if yj != 0 {
                continue;
            }
            pairs += 1;
            if scores[i] > scores[j] {
                num += 1.0;
            } else if scores[i] == scores[j] {
                num += 0.5;
            }
        }
    }
    (pairs > 0).then(|| num / pairs as f64)
}

fn h(counts: &[f64]) -> f64 {
    let n: f64 = counts.iter().sum();
    if n == 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| -(c / n) * (c / n).log2())
        .sum()
}

fn k_of(counts: &[f64]) -> f64 {
    counts.iter().filter(|&&c| c > 0.0).count() as f64
}

/// Whether the MDL rule accepts splitting `labels` (already ordered by value)
/// into `labels[..cut]` and `labels[cut..]`, and the gain of that split.
pub fn mdl_accepts(labels: &[u8], cut: usize) -> (bool, f64) {
    let count = |s: &[u8]| {
        let pos = s.iter().filter(|&&y| y == 1).count() as f64;
        [s.len() as f64 - pos, pos]
    };
    let (all, left, right) = (count(labels), count(&labels[..cut]), count(&labels[cut..]));
    let n = labels.len() as f64;
    let cond = (cut as f64 / n) * h(&left) + ((n - cut as f64) / n) * h(&right);
    let gain = h(&all) - cond;
    let delta = (3f64.powf(k_of(&all)) - 2.0).log2()
        - (k_of(&all) * h(&all) - k_of(&left) * h(&left) - k_of(&right) * h(&right));
    let threshold = ((n - 1.0).log2() + delta) / n;
    (gain > threshold, gain)
}

/// Information gain of a 0/1 column under MDL binning, recomputed from the
/// 2x2 contingency table.
pub fn binary_feature_gain(column: &[f64], labels: &[u8]) -> f64 {
    let mut order: Vec<usize> = (0..column.len()).collect();
    order.sort_by(|&a, &b| {
        column[a]
            .total_cmp(&column[b])
            .then(labels[a].cmp(&labels[b]))
    });
    let sorted: Vec<u8> = order.iter().map(|&i| labels[i]).collect();
    let zeros = column.iter().filter(|&&v| v == 0.0).count();
    if zeros == 0 || zeros == column.len() {
        return 0.0;
    }
    let (ok, gain) = mdl_accepts(&sorted, zeros);
    if ok {
        gain
    } else {
        0.0
    }
}

/// Largest KKT violation of a dual solution on a precomputed kernel.
pub fn kkt_residual(kernel: &[f64], y: &[f64], alpha: &[f64], bias: f64, c: f64) -> f64 {
    let n = y.len();
    let mut worst: f64 = alpha.iter().zip(y).map(|(a, yi)| a * yi).sum::<f64>().abs();
    for i in 0..n {
        let f: f64 = (0..n)
            .map(|j| alpha[j] * y[j] * kernel[i * n + j])
            .sum::<f64>()
            + bias;
        let m = y[i] * f;
        let eps = 1e-8 * c;
        let v = if alpha[i] <= eps {
            (1.0 - m).max(0.0)
        } else if alpha[i] >= c - eps {
            (m - 1.0).max(0.0)
        } else {
            (m - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}

/// Central finite differences of the mean log-loss.
pub fn numeric_gradient(
    w: &[f64],
    d: usize,
    hidden: usize,
    xs: &[Vec<f64>],
    ys: &[u8],
) -> Vec<f64> {
    let rows: Vec<usize> = (0..xs.len()).collect();
    let step = 1e-5;
    (0..w.len())
        .map(|i| {
            let mut plus = w.to_vec();
            let mut minus = w.to_vec();
            plus[i] += step;
            minus[i] -= step;
            let lp = loss_and_gradient(&plus, d, hidden, xs, ys, &rows).0;
            let lm = loss_and_gradient(&minus, d, hidden, xs, ys, &rows).0;
            (lp - lm) / (2.0 * step)
        })
        .collect()
}

pub fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-8 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

pub fn dataset(rows: Vec<Vec<f64>>, labels: Vec<u8>) -> TabularDataset {
    let d = rows.first().map_or(0, Vec::len);
    TabularDataset::from_rows(rows, labels, TabularDataset::default_names(d)).unwrap()
}

pub fn training_accuracy(model: &drstack::TrainedModel, ds: &TabularDataset) -> f64 {
    let hits = ds
        .rows()
        .zip(ds.labels())
        .filter(|(r, &y)| model.predict(r).unwrap() == y)
        .count();
    hits as f64 / ds.n_rows() as f64
}

/// Learner that logs every fit and returns a constant model whose output
/// encodes the training rows it saw, so scored values can be traced back to
/// the fit that produced them.
#[derive(Clone)]
pub struct Recorder {
    pub name: String,
    /// Shared by clones, so a copy handed to an ensemble still reports here.
    pub fits: std::sync::Arc<std::sync::Mutex<Vec<(u64, Vec<usize>)>>>,
}

impl Recorder {
    pub fn new(name: &str) -> Self {
        Recorder {
            name: name.to_string(),
            fits: Default::default(),
        }
    }

    pub fn fits(&self) -> Vec<(u64, Vec<usize>)> {
        self.fits.lock().unwrap().clone()
    }

    /// The probability a model fitted on `rows` outputs.
    pub fn signature(rows: &[usize]) -> f64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64;
        let mut sorted = rows.to_vec();
        sorted.sort_unstable();
        for r in sorted {
            h = (h ^ r as u64).wrapping_mul(0x100_0000_01b3);
        }
        let bias = (h >> 11) as f64 / (1u64 << 53) as f64 * 8.0 - 4.0;
        drstack::learners::mlp::sigmoid(bias)
    }
}

impl drstack::Learner for Recorder {
    fn name(&self) -> &str {
        &self.name
    }

    fn fit(&self, ds: &TabularDataset, seed: u64) -> drstack::Result<drstack::TrainedModel> {
        self.fits
            .lock()
            .unwrap()
            .push((seed, ds.row_ids().to_vec()));
        let p = Self::signature(ds.row_ids());
        let d = ds.n_features();
        Ok(drstack::TrainedModel::Logistic(
            drstack::learners::LogisticModel {
                weights: vec![0.0; d],
                bias: (p / (1.0 - p)).ln(),
                standardizer: drstack::learners::standardize::Standardizer {
                    mean: vec![0.0; d],
                    scale: vec![1.0; d],
                },
            },
        ))
    }

    fn spec(&self) -> drstack::LearnerSpec {
        drstack::LearnerSpec::Logistic(drstack::learners::LogisticParams::default())
    }
}
