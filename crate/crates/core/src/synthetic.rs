//! Seeded synthetic datasets for tests, benchmarks and demos.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::TabularDataset;
use crate::seed;

/// A dataset shaped like the Messidor features table: `n_neg + n_pos` rows,
/// 19 features with a mix of binary flags, integer counts and continuous
/// measurements, of which only some carry label signal.
pub fn messidor_like(n_neg: usize, n_pos: usize, seed: u64) -> TabularDataset {
    let mut rng = seed::rng(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut labels: Vec<u8> = std::iter::repeat(0)
        .take(n_neg)
        .chain(std::iter::repeat(1).take(n_pos))
        .collect();
    labels.shuffle(&mut rng);
    let rows = labels
        .iter()
        .map(|&y| {
            let shift = if y == 1 { 0.5 } else { -0.5 };
            let severity: f64 = normal.sample(&mut rng) + shift;
            let mut row = Vec::with_capacity(19);
            // 0-1: quality and pre-screening flags.
            row.push(f64::from(u8::from(rng.gen::<f64>() < 0.99)));
            row.push(f64::from(u8::from(
                rng.gen::<f64>() < 0.9 + 0.03 * f64::from(y),
            )));
            // 2-7: lesion counts at decreasing confidence, sharing the latent severity.
            for j in 0..6 {
                let lam =
                    (3.0 + 2.5 * severity - 0.4 * j as f64 + normal.sample(&mut rng)).max(0.0);
                row.push((lam * (10.0 - j as f64)).round());
            }
            // 8-15: continuous exudate scores; the first few are informative.
            for j in 0..8 {
                let w = if j < 3 { 0.6 } else { 0.05 };
                row.push(((w * severity + normal.sample(&mut rng)) * 0.05 + 0.1).abs());
            }
            // 16-17: geometry, weakly related.
            row.push(0.52 + 0.03 * normal.sample(&mut rng) + 0.002 * severity);
            row.push(0.11 + 0.02 * normal.sample(&mut rng));
            // 18: AM/FM flag.
            row.push(f64::from(u8::from(
                normal.sample(&mut rng) + 0.3 * severity > 0.2,
            )));
            row
        })
        .collect();
    TabularDataset::from_rows(rows, labels, TabularDataset::default_names(19))
        .expect("generated rows are valid")
        .with_source(format!("synthetic:messidor_like:{n_neg}:{n_pos}:{seed}"))
}

/// Two Gaussian blobs in `d` dimensions whose means are `separation`
/// standard deviations apart along the first axis.
pub fn blobs(n_per_class: usize, d: usize, separation: f64, seed: u64) -> TabularDataset {
    let mut rng = seed::rng(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rows = Vec::with_capacity(2 * n_per_class);
    let mut labels = Vec::with_capacity(2 * n_per_class);
    for i in 0..2 * n_per_class {
        let y = (i % 2) as u8;
        let mut row: Vec<f64> = (0..d).map(|_| normal.sample(&mut rng)).collect();
        row[0] += if y == 1 {
            separation / 2.0
        } else {
            -separation / 2.0
        };
        rows.push(row);
        labels.push(y);
    }
    TabularDataset::from_rows(rows, labels, TabularDataset::default_names(d))
        .expect("generated rows are valid")
}
