//! Soft-margin SVM trained by sequential minimal optimization.
//!
//! The solver follows the libsvm formulation of the dual: it keeps the
//! gradient `G = Q alpha - 1`, picks the maximal violating pair with
//! second-order working-set selection, and stops when the violation gap
//! `m(alpha) - M(alpha)` drops below the tolerance. Inputs are standardized
//! with training statistics before the kernel is applied. Probabilities come
//! from Platt scaling fitted on out-of-fold decision values.

use serde::{Deserialize, Serialize};

use super::platt::{fit_platt, PlattScaling};
use super::standardize::Standardizer;
use crate::dataset::{stratified_k_folds, ClassCounts, TabularDataset};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    /// `exp(-gamma |x - z|^2)`; `gamma = None` means `1 / d`.
    Rbf {
        gamma: Option<f64>,
    },
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Kernel {
    Rbf { gamma: f64 },
    Linear,
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmParams {
    pub kernel: KernelSpec,
    pub c: f64,
    pub tolerance: f64,
    /// Iteration cap is `max_passes * n_rows`.
    pub max_passes: usize,
    /// Folds used to produce out-of-fold decision values for Platt scaling.
    pub platt_folds: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            kernel: KernelSpec::Rbf { gamma: None },
            c: 1.0,
            tolerance: 1e-3,
            max_passes: 200,
            platt_folds: 3,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::Config("svm C must be finite and > 0".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("svm tolerance must be > 0".into()));
        }
        if let KernelSpec::Rbf { gamma: Some(g) } = self.kernel {
            if !(g > 0.0) {
                return Err(Error::Config("svm gamma must be > 0".into()));
            }
        }
        if self.platt_folds < 2 {
            return Err(Error::Config("svm platt_folds must be >= 2".into()));
        }
        Ok(())
    }

    fn resolve_kernel(&self, n_features: usize) -> Kernel {
        match self.kernel {
            KernelSpec::Linear => Kernel::Linear,
            KernelSpec::Rbf { gamma } => Kernel::Rbf {
                gamma: gamma.unwrap_or(1.0 / n_features.max(1) as f64),
            },
        }
    }
}

/// Output of the dual solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoSolution {
    pub alpha: Vec<f64>,
    /// Offset in `f(x) = sum_i alpha_i y_i K(x_i, x) + bias`.
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Solves the C-SVM dual over a precomputed kernel matrix (row-major, n x n)
/// with targets `y` in {-1, +1}.
pub fn smo(
    kernel: &[f64],
    y: &[f64],
    c: f64,
    tolerance: f64,
    max_iterations: usize,
) -> SmoSolution {
    let n = y.len();
    let k = |i: usize, j: usize| kernel[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);
    const TAU: f64 = 1e-12;

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        // Maximal violator from the up set.
        let mut g_max = f64::NEG_INFINITY;
        let mut i = usize::MAX;
        for t in 0..n {
            if in_up(alpha[t], y[t]) {
                let v = -y[t] * grad[t];
                if v > g_max {
                    g_max = v;
                    i = t;
                }
            }
        }
        // Second-order partner from the low set.
        let mut g_min = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best_obj = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let v = -y[t] * grad[t];
            if v < g_min {
                g_min = v;
            }
            if i != usize::MAX && v < g_max {
                let b = g_max - v;
                let mut a = k(i, i) + k(t, t) - 2.0 * k(i, t);
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < best_obj {
                    best_obj = obj;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || g_max - g_min < tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k(t, i) * di + y[j] * k(t, j) * dj);
        }
    }

    // rho as in libsvm: average of y_i G_i over free vectors, else the
    // midpoint of the feasible interval.
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut sum_free) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            sum_free += yg;
        }
    }
    let rho = if free > 0 {
        sum_free / free as f64
    } else {
        (ub + lb) / 2.0
    };
    SmoSolution {
        alpha,
        bias: -rho,
        converged,
        iterations,
    }
}

/// Kernel expansion over standardized support vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmDecision {
    pub kernel: Kernel,
    pub standardizer: Standardizer,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` for each support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl SvmDecision {
    pub fn value(&self, x: &[f64]) -> f64 {
        let z = self.standardizer.apply(x);
        self.bias
            + self
                .support_vectors
                .iter()
                .zip(&self.coefficients)
                .map(|(sv, c)| c * self.kernel.eval(sv, &z))
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub n_features: usize,
    /// Set when the training data held a single class.
    pub constant_class: Option<u8>,
    pub decision: Option<SvmDecision>,
    pub platt: PlattScaling,
}

impl SvmModel {
    pub fn decision_value(&self, x: &[f64]) -> f64 {
        match (&self.decision, self.constant_class) {
            (Some(d), _) => d.value(x),
            (None, Some(1)) => 1.0,
            _ => -1.0,
        }
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        match self.constant_class {
            Some(c) => f64::from(c),
            None => self.platt.probability(self.decision_value(x)),
        }
    }

    pub fn converged(&self) -> bool {
        self.decision.as_ref().map_or(true, |d| d.converged)
    }
}

/// Fits only the decision function (no calibration).
pub fn fit_decision(ds: &TabularDataset, params: &SvmParams) -> SvmDecision {
    let standardizer = Standardizer::fit(ds);
    let xs = standardizer.transform(ds);
    let kernel = params.resolve_kernel(ds.n_features());
    let n = xs.len();
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(&xs[i], &xs[j]);
            gram[i * n + j] = v;
            gram[j * n + i] = v;
        }
    }
    let y: Vec<f64> = ds
        .labels()
        .iter()
        .map(|&l| if l == 1 { 1.0 } else { -1.0 })
        .collect();
    let sol = smo(
        &gram,
        &y,
        params.c,
        params.tolerance,
        params.max_passes.saturating_mul(n).max(1),
    );
    let mut support_vectors = Vec::new();
    let mut coefficients = Vec::new();
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support_vectors.push(xs[t].clone());
            coefficients.push(a * y[t]);
        }
    }
    SvmDecision {
        kernel,
        standardizer,
        support_vectors,
        coefficients,
        bias: sol.bias,
        converged: sol.converged,
        iterations: sol.iterations,
    }
}

pub fn train_svm(ds: &TabularDataset, params: &SvmParams, seed: u64) -> Result<SvmModel> {
    if ds.is_empty() {
        return Err(Error::EmptyData);
    }
    params.validate()?;
    let counts = ClassCounts::of(ds.labels());
    if counts.negative == 0 || counts.positive == 0 {
        return Ok(SvmModel {
            n_features: ds.n_features(),
            constant_class: Some(counts.majority()),
            decision: None,
            platt: PlattScaling { a: 0.0, b: 0.0 },
        });
    }
    let decision = fit_decision(ds, params);

    // Out-of-fold decision values; tiny classes fall back to in-sample values.
    let oof: Vec<f64> =
        match stratified_k_folds(ds.labels(), params.platt_folds, seed::derive(seed, 0x504c)) {
            Ok(folds) => {
                let mut values = vec![0.0; ds.n_rows()];
                for f in 0..folds.k() {
                    let inner = fit_decision(&ds.subset_rows(&folds.train_rows(f)), params);
                    for r in folds.test_rows(f) {
                        values[r] = inner.value(ds.row(r));
                    }
                }
                values
            }
            Err(_) => ds.rows().map(|r| decision.value(r)).collect(),
        };
    let platt = fit_platt(&oof, ds.labels());
    Ok(SvmModel {
        n_features: ds.n_features(),
        constant_class: None,
        decision: Some(decision),
        platt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_linear_solution() {
        let ds =
            TabularDataset::from_rows(vec![vec![-1.0], vec![1.0]], vec![0, 1], vec!["x".into()])
                .unwrap();
        let params = SvmParams {
            kernel: KernelSpec::Linear,
            c: 1e6,
            ..Default::default()
        };
        let d = fit_decision(&ds, &params);
        assert!(d.converged);
        assert!((d.value(&[-1.0]) + 1.0).abs() < 1e-9);
        assert!((d.value(&[1.0]) - 1.0).abs() < 1e-9);
        assert!(d.value(&[0.0]).abs() < 1e-9);
    }

    #[test]
    fn single_class_predicts_that_class() {
        let ds = TabularDataset::from_rows(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0, 0, 0],
            vec!["x".into()],
        )
        .unwrap();
        let m = train_svm(&ds, &SvmParams::default(), 0).unwrap();
        for r in ds.rows() {
            assert_eq!(m.predict_proba(r), 0.0);
        }
        assert_eq!(m.predict_proba(&[100.0]), 0.0);
    }

    #[test]
    fn invalid_c_rejected() {
        let p = SvmParams {
            c: 0.0,
            ..Default::default()
        };
        assert!(matches!(p.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let xs: Vec<Vec<f64>> = (0..30)
            .map(|i| vec![(i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()])
            .collect();
        let ys = (0..30).map(|i| (i % 2) as u8).collect();
        let ds = TabularDataset::from_rows(xs, ys, TabularDataset::default_names(2)).unwrap();
        let p = SvmParams {
            max_passes: 0,
            ..Default::default()
        };
        let d = fit_decision(&ds, &p);
        assert!(!d.converged);
        assert_eq!(d.iterations, 1);
    }
}
