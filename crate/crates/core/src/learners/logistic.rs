use serde::{Deserialize, Serialize};

use super::mlp::sigmoid;
use super::standardize::Standardizer;
use crate::dataset::TabularDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    /// L2 penalty on weights and bias.
    pub l2: f64,
    pub iterations: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1e-4,
            iterations: 2000,
        }
    }
}

impl LogisticParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2 >= 0.0) || !self.l2.is_finite() {
            return Err(Error::Config("logistic l2 must be finite and >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer,
}

impl LogisticModel {
    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let z = self.standardizer.apply(x);
        sigmoid(self.bias + self.weights.iter().zip(&z).map(|(w, v)| w * v).sum::<f64>())
    }
}

/// Full-batch gradient descent on mean log-loss plus `l2/2 * (|w|^2 + b^2)`,
/// starting from zero. The step size is the reciprocal of an upper bound on
/// the objective's curvature, so every step decreases the loss.
pub fn train_logistic(ds: &TabularDataset, params: &LogisticParams) -> Result<LogisticModel> {
    if ds.is_empty() {
        return Err(Error::EmptyData);
    }
    params.validate()?;
    let standardizer = Standardizer::fit(ds);
    let xs = standardizer.transform(ds);
    let d = ds.n_features();
    let n = ds.n_rows() as f64;
    let trace: f64 = 1.0
        + (0..d)
            .map(|j| xs.iter().map(|r| r[j] * r[j]).sum::<f64>() / n)
            .sum::<f64>();
    let step = 1.0 / (0.25 * trace + params.l2);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut grad = vec![0.0; d];
    for _ in 0..params.iterations {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_b = 0.0;
        for (x, &y) in xs.iter().zip(ds.labels()) {
            let z = b + w.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
            let r = sigmoid(z) - f64::from(y);
            for (g, v) in grad.iter_mut().zip(x) {
                *g += r * v;
            }
            grad_b += r;
        }
        for (wj, g) in w.iter_mut().zip(&grad) {
            *wj -= step * (g / n + params.l2 * *wj);
        }
        b -= step * (grad_b / n + params.l2 * b);
    }
    Ok(LogisticModel {
        weights: w,
        bias: b,
        standardizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_d(xs: &[f64], ys: &[u8]) -> TabularDataset {
        TabularDataset::from_rows(
            xs.iter().map(|&x| vec![x]).collect(),
            ys.to_vec(),
            vec!["x".into()],
        )
        .unwrap()
    }

    #[test]
    fn identity_feature_gets_positive_weight() {
        let ds = one_d(&[0.0, 1.0, 0.0, 1.0, 1.0, 0.0], &[0, 1, 0, 1, 1, 0]);
        let m = train_logistic(&ds, &LogisticParams::default()).unwrap();
        assert!(m.weights[0] > 0.0);
        for (row, &y) in ds.rows().zip(ds.labels()) {
            assert_eq!(u8::from(m.predict_proba(row) >= 0.5), y);
        }
    }

    #[test]
    fn huge_penalty_collapses_to_half() {
        let ds = one_d(&[0.0, 1.0, 1.0, 1.0, 2.0], &[0, 1, 1, 1, 1]);
        let m = train_logistic(
            &ds,
            &LogisticParams {
                l2: 1e9,
                iterations: 2000,
            },
        )
        .unwrap();
        assert!(m.weights[0].abs() < 1e-8 && m.bias.abs() < 1e-8);
        assert!((m.predict_proba(&[5.0]) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn duplicating_rows_leaves_fit_unchanged() {
        let xs = [0.3, 1.2, -0.7, 2.5, 0.9, -1.1];
        let ys = [0, 1, 0, 1, 0, 1];
        let m1 = train_logistic(&one_d(&xs, &ys), &LogisticParams::default()).unwrap();
        let xs2: Vec<f64> = xs.iter().chain(&xs).copied().collect();
        let ys2: Vec<u8> = ys.iter().chain(&ys).copied().collect();
        let m2 = train_logistic(&one_d(&xs2, &ys2), &LogisticParams::default()).unwrap();
        assert!((m1.weights[0] - m2.weights[0]).abs() < 1e-9);
        assert!((m1.bias - m2.bias).abs() < 1e-9);
    }

    #[test]
    fn zero_model_gives_exact_half() {
        let m = LogisticModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            standardizer: Standardizer {
                mean: vec![0.0; 2],
                scale: vec![1.0; 2],
            },
        };
        assert_eq!(m.predict_proba(&[3.0, -2.0]), 0.5);
    }
}
