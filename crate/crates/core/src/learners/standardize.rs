use serde::{Deserialize, Serialize};

use crate::dataset::TabularDataset;

/// Per-feature z-score statistics taken from training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Constant columns get scale 1 so they map to zero.
    pub fn fit(ds: &TabularDataset) -> Self {
        let n = ds.n_rows().max(1) as f64;
        let d = ds.n_features();
        let mut mean = vec![0.0; d];
        for row in ds.rows() {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in ds.rows() {
            for j in 0..d {
                let c = row[j] - mean[j];
                var[j] += c * c;
            }
        }
        let scale = var
            .into_iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 1e-12 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Standardized copy of every row, row-major.
    pub fn transform(&self, ds: &TabularDataset) -> Vec<Vec<f64>> {
        ds.rows().map(|r| self.apply(r)).collect()
    }
}
