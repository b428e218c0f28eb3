//! Single-hidden-layer perceptron with sigmoid units, trained on log-loss by
//! mini-batch gradient descent with momentum.
//!
//! Parameters live in one flat vector laid out as
//! `[hidden weights (h x d, row-major) | hidden biases (h) | output weights (h) | output bias]`.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::standardize::Standardizer;
use crate::dataset::TabularDataset;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpParams {
    /// Hidden units; `None` means `ceil((d + 2) / 2)`.
    pub hidden: Option<usize>,
    pub learning_rate: f64,
    pub momentum: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for MlpParams {
    fn default() -> Self {
        MlpParams {
            hidden: None,
            learning_rate: 0.3,
            momentum: 0.2,
            epochs: 500,
            batch_size: 32,
        }
    }
}

impl MlpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("mlp learning_rate must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Config("mlp momentum must be in [0, 1)".into()));
        }
        if self.batch_size == 0 || self.hidden == Some(0) {
            return Err(Error::Config(
                "mlp batch_size and hidden must be >= 1".into(),
            ));
        }
        Ok(())
    }

    pub fn hidden_units(&self, n_features: usize) -> usize {
        self.hidden.unwrap_or((n_features + 2).div_ceil(2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub n_features: usize,
    pub hidden: usize,
    pub weights: Vec<f64>,
    pub standardizer: Standardizer,
}

impl Mlp {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let z = self.standardizer.apply(x);
        sigmoid(output_logit(
            &self.weights,
            self.n_features,
            self.hidden,
            &z,
            &mut vec![0.0; self.hidden],
        ))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub fn parameter_count(d: usize, h: usize) -> usize {
    h * d + h + h + 1
}

/// Output pre-activation; fills `act` with hidden activations.
fn output_logit(w: &[f64], d: usize, h: usize, x: &[f64], act: &mut [f64]) -> f64 {
    let (w1, rest) = w.split_at(h * d);
    let (b1, rest) = rest.split_at(h);
    let (w2, b2) = rest.split_at(h);
    let mut z = b2[0];
    for u in 0..h {
        let row = &w1[u * d..(u + 1) * d];
        let a = sigmoid(b1[u] + row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>());
        act[u] = a;
        z += w2[u] * a;
    }
    z
}

/// Mean log-loss over `rows` and its gradient with respect to `w`.
pub fn loss_and_gradient(
    w: &[f64],
    d: usize,
    h: usize,
    xs: &[Vec<f64>],
    ys: &[u8],
    rows: &[usize],
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; w.len()];
    let mut loss = 0.0;
    let mut act = vec![0.0; h];
    let w2_off = h * d + h;
    for &r in rows {
        let x = &xs[r];
        let y = f64::from(ys[r]);
        let z = output_logit(w, d, h, x, &mut act);
        loss += softplus(z) - y * z;
        let delta_out = sigmoid(z) - y;
        for u in 0..h {
            grad[w2_off + u] += delta_out * act[u];
            let delta_h = delta_out * w[w2_off + u] * act[u] * (1.0 - act[u]);
            let g_row = &mut grad[u * d..(u + 1) * d];
            for (g, xv) in g_row.iter_mut().zip(x) {
                *g += delta_h * xv;
            }
            grad[h * d + u] += delta_h;
        }
        grad[w2_off + h] += delta_out;
    }
    let n = rows.len().max(1) as f64;
    grad.iter_mut().for_each(|g| *g /= n);
    (loss / n, grad)
}

pub fn init_weights(d: usize, h: usize, seed: u64) -> Vec<f64> {
    let mut rng = seed::rng(seed);
    (0..parameter_count(d, h))
        .map(|_| rng.gen_range(-0.5..=0.5))
        .collect()
}

pub fn train_mlp(ds: &TabularDataset, params: &MlpParams, seed: u64) -> Result<Mlp> {
    if ds.is_empty() {
        return Err(Error::EmptyData);
    }
    params.validate()?;
    let d = ds.n_features();
    let h = params.hidden_units(d);
    let standardizer = Standardizer::fit(ds);
    let xs = standardizer.transform(ds);
    let ys = ds.labels();
    let mut w = init_weights(d, h, seed::derive(seed, 0));
    let mut velocity = vec![0.0; w.len()];
    let mut order: Vec<usize> = (0..ds.n_rows()).collect();
    let mut rng = seed::rng(seed::derive(seed, 1));
    for epoch in 0..params.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(params.batch_size) {
            let (loss, grad) = loss_and_gradient(&w, d, h, &xs, ys, batch);
            epoch_loss += loss * batch.len() as f64;
            for ((wi, vi), gi) in w.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
                *vi = params.momentum * *vi - params.learning_rate * gi;
                *wi += *vi;
            }
        }
        if !epoch_loss.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
    }
    Ok(Mlp {
        n_features: d,
        hidden: h,
        weights: w,
        standardizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hidden_default_rule() {
        assert_eq!(MlpParams::default().hidden_units(19), 11);
        assert_eq!(MlpParams::default().hidden_units(5), 4);
    }

    #[test]
    fn zero_epochs_still_a_probability() {
        let ds = TabularDataset::from_rows(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![0, 1],
            TabularDataset::default_names(2),
        )
        .unwrap();
        let m = train_mlp(
            &ds,
            &MlpParams {
                epochs: 0,
                ..Default::default()
            },
            1,
        )
        .unwrap();
        assert_eq!(m.weights, init_weights(2, 2, seed::derive(1, 0)));
        for row in ds.rows() {
            let p = m.predict_proba(row);
            assert!((0.0..=1.0).contains(&p));
        }
    }

    #[test]
    fn diverging_rate_reports_epoch() {
        let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let labels = (0..20).map(|i| (i % 2) as u8).collect();
        let ds = TabularDataset::from_rows(rows, labels, TabularDataset::default_names(2)).unwrap();
        let p = MlpParams {
            learning_rate: f64::MAX,
            momentum: 0.0,
            epochs: 50,
            ..Default::default()
        };
        assert!(matches!(
            train_mlp(&ds, &p, 0),
            Err(Error::NonFiniteLoss { .. })
        ));
    }

    #[test]
    fn sigmoid_is_stable() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-1000.0) >= 0.0 && sigmoid(1000.0) <= 1.0);
        assert!((softplus(-800.0)).abs() < 1e-300);
        assert_eq!(softplus(800.0), 800.0);
    }
}
