//! Binary CART classifier with gini impurity.
//!
//! Candidate thresholds are midpoints between adjacent distinct sorted values;
//! a row goes left when `value <= threshold`. Ties between equally good
//! splits keep the first candidate found, scanning features in ascending index
//! order and thresholds in ascending value order.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::TabularDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: 12,
            min_leaf: 2,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf == 0 {
            return Err(Error::Config("tree min_leaf must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        /// Class-1 frequency among the training rows that reached this leaf.
        probability: f64,
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub nodes: Vec<TreeNode>,
    pub n_features: usize,
    pub params: TreeParams,
}

impl DecisionTree {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { probability, .. } => return *probability,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match &nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

pub fn train_decision_tree(ds: &TabularDataset, params: &TreeParams) -> Result<DecisionTree> {
    if ds.is_empty() {
        return Err(Error::EmptyData);
    }
    params.validate()?;
    let rows: Vec<usize> = (0..ds.n_rows()).collect();
    Ok(grow(
        ds,
        rows,
        params,
        None::<(&mut rand_chacha::ChaCha8Rng, usize)>,
    ))
}

/// Grows a tree over `rows` (duplicates allowed, as in a bootstrap sample).
/// With `subsample = Some((rng, m))`, each split considers `m` features drawn
/// without replacement.
pub(crate) fn grow<R: Rng>(
    ds: &TabularDataset,
    rows: Vec<usize>,
    params: &TreeParams,
    mut subsample: Option<(&mut R, usize)>,
) -> DecisionTree {
    let mut nodes = Vec::new();
    // (rows, depth, slot in parent to patch)
    let mut stack: Vec<(Vec<usize>, usize, Option<(usize, bool)>)> = vec![(rows, 0, None)];
    while let Some((rows, depth, parent)) = stack.pop() {
        let id = nodes.len();
        if let Some((p, is_left)) = parent {
            if let TreeNode::Split { left, right, .. } = &mut nodes[p] {
                if is_left {
                    *left = id;
                } else {
                    *right = id;
                }
            }
        }
        let positives = rows.iter().filter(|&&r| ds.label(r) == 1).count();
        let leaf = TreeNode::Leaf {
            probability: positives as f64 / rows.len() as f64,
            samples: rows.len(),
        };
        let pure = positives == 0 || positives == rows.len();
        if pure || depth >= params.max_depth || rows.len() < 2 * params.min_leaf {
            nodes.push(leaf);
            continue;
        }
        let features: Vec<usize> = match subsample.as_mut() {
            Some((rng, m)) if *m < ds.n_features() => {
                let mut f = index::sample(*rng, ds.n_features(), *m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..ds.n_features()).collect(),
        };
        match best_split(ds, &rows, positives, &features, params.min_leaf) {
            None => nodes.push(leaf),
            Some((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = rows
                    .iter()
                    .partition(|&&i| ds.value(i, feature) <= threshold);
                nodes.push(TreeNode::Split {
                    feature,
                    threshold,
                    left: usize::MAX,
                    right: usize::MAX,
                });
                // Right pushed first so the left subtree is numbered first.
                stack.push((r, depth + 1, Some((id, false))));
                stack.push((l, depth + 1, Some((id, true))));
            }
        }
    }
    DecisionTree {
        nodes,
        n_features: ds.n_features(),
        params: *params,
    }
}

/// Gini impurity times node size, `n * (1 - p^2 - q^2)`.
fn weighted_gini(n: usize, pos: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let p = pos as f64 / n;
    n * 2.0 * p * (1.0 - p)
}

fn best_split(
    ds: &TabularDataset,
    rows: &[usize],
    positives: usize,
    features: &[usize],
    min_leaf: usize,
) -> Option<(usize, f64)> {
    let n = rows.len();
    let parent = weighted_gini(n, positives);
    let mut best: Option<(f64, usize, f64)> = None;
    let mut sorted: Vec<(f64, u8)> = Vec::with_capacity(n);
    for &feature in features {
        sorted.clear();
        sorted.extend(rows.iter().map(|&r| (ds.value(r, feature), ds.label(r))));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut left_pos = 0;
        for i in 0..n - 1 {
            left_pos += sorted[i].1 as usize;
            let left_n = i + 1;
            if sorted[i].0 == sorted[i + 1].0 || left_n < min_leaf || n - left_n < min_leaf {
                continue;
            }
            let score =
                weighted_gini(left_n, left_pos) + weighted_gini(n - left_n, positives - left_pos);
            if best.map_or(true, |(s, _, _)| score < s) {
                best = Some((score, feature, midpoint(sorted[i].0, sorted[i + 1].0)));
            }
        }
    }
    match best {
        Some((score, feature, threshold)) if parent - score > 1e-12 * n as f64 => {
            Some((feature, threshold))
        }
        _ => None,
    }
}

/// Midpoint of `a < b` that still satisfies `a <= t < b` in floating point.
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
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
    fn separates_two_clusters_with_one_split() {
        let ds = one_d(&[0.0, 1.0, 10.0, 11.0], &[0, 0, 1, 1]);
        let t = train_decision_tree(
            &ds,
            &TreeParams {
                max_depth: 12,
                min_leaf: 1,
            },
        )
        .unwrap();
        assert_eq!(t.nodes.len(), 3);
        match t.nodes[0] {
            TreeNode::Split { threshold, .. } => assert!(threshold > 1.0 && threshold < 10.0),
            _ => panic!("expected split"),
        }
        for (row, &y) in ds.rows().zip(ds.labels()) {
            assert_eq!(u8::from(t.predict_proba(row) >= 0.5), y);
        }
    }

    #[test]
    fn pure_node_is_a_single_leaf() {
        let ds = one_d(&[0.0, 1.0, 2.0], &[1, 1, 1]);
        let t = train_decision_tree(&ds, &TreeParams::default()).unwrap();
        assert_eq!(
            t.nodes,
            vec![TreeNode::Leaf {
                probability: 1.0,
                samples: 3
            }]
        );
    }

    #[test]
    fn depth_zero_gives_prior() {
        let ds = one_d(&[0.0, 1.0, 2.0, 3.0], &[0, 1, 1, 1]);
        let t = train_decision_tree(
            &ds,
            &TreeParams {
                max_depth: 0,
                min_leaf: 1,
            },
        )
        .unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict_proba(&[0.0]), 0.75);
    }

    #[test]
    fn min_leaf_is_respected() {
        let ds = one_d(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], &[0, 1, 1, 1, 1, 1]);
        let t = train_decision_tree(
            &ds,
            &TreeParams {
                max_depth: 5,
                min_leaf: 2,
            },
        )
        .unwrap();
        for node in &t.nodes {
            if let TreeNode::Leaf { samples, .. } = node {
                assert!(*samples >= 2);
            }
        }
    }

    #[test]
    fn midpoint_of_adjacent_floats_stays_left_of_upper() {
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let m = midpoint(a, b);
        assert!(a <= m && m < b);
    }

    #[test]
    fn empty_dataset_rejected() {
        let ds = TabularDataset::from_rows(vec![], vec![], vec!["x".into()]).unwrap();
        assert!(matches!(
            train_decision_tree(&ds, &TreeParams::default()),
            Err(Error::EmptyData)
        ));
    }
}
