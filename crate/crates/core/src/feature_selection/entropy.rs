//! Entropy, recursive MDL discretization and information gain.

use serde::{Deserialize, Serialize};

use crate::dataset::TabularDataset;
use crate::error::{Error, Result};

/// Shannon entropy in bits of a class-count vector, with `0 log 0 = 0`.
pub fn entropy(counts: &[usize]) -> Result<f64> {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return Err(Error::ZeroCounts);
    }
    Ok(entropy_of(counts, n))
}

fn entropy_of(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

fn binary_entropy(pos: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        entropy_of(&[n - pos, pos], n)
    }
}

fn classes_present(pos: usize, n: usize) -> f64 {
    f64::from(u8::from(pos > 0) + u8::from(pos < n))
}

/// Sorted cut points per feature. A value `v` falls into bin `i` where `i`
/// is the number of cuts strictly below `v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationScheme {
    pub cuts: Vec<Vec<f64>>,
}

impl DiscretizationScheme {
    /// MDL-discretizes every feature of `ds` against its labels.
    pub fn fit_mdl(ds: &TabularDataset) -> Self {
        let cuts = (0..ds.n_features())
            .map(|j| {
                discretize_mdl(&ds.column(j), ds.labels())
                    .expect("column and labels share a length")
            })
            .collect();
        DiscretizationScheme { cuts }
    }

    pub fn bin(&self, feature: usize, value: f64) -> usize {
        self.cuts[feature].partition_point(|&c| c < value)
    }
}

/// Recursive binary discretization with the minimum-description-length
/// stopping rule: a cut with gain `G` on a set of `N` rows is kept when
/// `G > (log2(N - 1) + delta) / N`, where
/// `delta = log2(3^k - 2) - (k Ent(S) - k1 Ent(S1) - k2 Ent(S2))` and the
/// `k` terms count the classes present in each set.
///
/// Candidate cuts sit midway between adjacent distinct values, skipping
/// boundaries where both neighbouring value groups are pure in the same class.
pub fn discretize_mdl(values: &[f64], labels: &[u8]) -> Result<Vec<f64>> {
    if values.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: values.len(),
            right: labels.len(),
        });
    }
    let mut pairs: Vec<(f64, u8)> = values.iter().copied().zip(labels.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut cuts = Vec::new();
    split_recursive(&pairs, &mut cuts);
    Ok(cuts)
}

/// Value groups of a sorted slice: `(end index exclusive, positives in group)`.
fn groups(pairs: &[(f64, u8)]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (i, &(v, y)) in pairs.iter().enumerate() {
        match out.last_mut() {
            Some((end, pos)) if pairs[*end - 1].0 == v => {
                *end = i + 1;
                *pos += y as usize;
            }
            _ => out.push((i + 1, y as usize)),
        }
    }
    out
}

fn split_recursive(pairs: &[(f64, u8)], cuts: &mut Vec<f64>) {
    let n = pairs.len();
    if n < 2 {
        return;
    }
    let total_pos: usize = pairs.iter().map(|p| p.1 as usize).sum();
    let parent = binary_entropy(total_pos, n);
    let groups = groups(pairs);
    let mut best: Option<(f64, usize, usize)> = None; // (gain, split index, left positives)
    let mut left_pos = 0;
    let mut start = 0;
    for g in 0..groups.len().saturating_sub(1) {
        let (end, pos) = groups[g];
        left_pos += pos;
        let this_size = end - start;
        let (next_end, next_pos) = groups[g + 1];
        let next_size = next_end - end;
        start = end;
        let this_pure = pos == 0 || pos == this_size;
        let next_pure = next_pos == 0 || next_pos == next_size;
        if this_pure && next_pure && (pos == 0) == (next_pos == 0) {
            continue;
        }
        let nl = end;
        let nr = n - end;
        let gain = parent
            - (nl as f64 / n as f64) * binary_entropy(left_pos, nl)
            - (nr as f64 / n as f64) * binary_entropy(total_pos - left_pos, nr);
        if best.map_or(true, |(g, _, _)| gain > g) {
            best = Some((gain, end, left_pos));
        }
    }
    let Some((gain, split, lpos)) = best else {
        return;
    };
    let nl = split;
    let nr = n - split;
    let k = classes_present(total_pos, n);
    let k1 = classes_present(lpos, nl);
    let k2 = classes_present(total_pos - lpos, nr);
    let delta = (3f64.powf(k) - 2.0).log2()
        - (k * parent - k1 * binary_entropy(lpos, nl) - k2 * binary_entropy(total_pos - lpos, nr));
    let threshold = (((n - 1) as f64).log2() + delta) / n as f64;
    if gain <= threshold {
        return;
    }
    split_recursive(&pairs[..split], cuts);
    cuts.push(crate::learners::tree::midpoint(
        pairs[split - 1].0,
        pairs[split].0,
    ));
    split_recursive(&pairs[split..], cuts);
}

/// Gain in bits of feature `feature` under the bins induced by `scheme`.
pub fn information_gain(
    ds: &TabularDataset,
    feature: usize,
    scheme: &DiscretizationScheme,
) -> Result<f64> {
    if feature >= ds.n_features() || feature >= scheme.cuts.len() {
        return Err(Error::IndexOutOfRange {
            index: feature,
            n_features: ds.n_features(),
        });
    }
    let n = ds.n_rows();
    if n == 0 {
        return Err(Error::EmptyData);
    }
    let bins = scheme.cuts[feature].len() + 1;
    let mut counts = vec![[0usize; 2]; bins];
    for i in 0..n {
        counts[scheme.bin(feature, ds.value(i, feature))][ds.label(i) as usize] += 1;
    }
    let pos = ds.class_distribution().positive;
    let mut gain = binary_entropy(pos, n);
    for c in &counts {
        let m = c[0] + c[1];
        if m > 0 {
            gain -= (m as f64 / n as f64) * binary_entropy(c[1], m);
        }
    }
    Ok(gain.max(0.0))
}
