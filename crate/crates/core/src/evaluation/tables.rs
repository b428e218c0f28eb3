//! Report tables built from a grid of cross-validation results.
//!
//! * accuracy grid: one row per dataset, one `mean(std)` cell per model;
//! * best single model vs. the ensemble on the original dataset;
//! * the ensemble on every derived subdataset;
//! * per-model accuracy on the best subdataset (bar-chart data).

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::cv::CvResult;
use super::metrics::Metric;
use crate::error::{Error, Result};

/// Row and column labels of the result grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableLayout {
    /// First entry is the original dataset.
    pub datasets: Vec<String>,
    /// Last entry is the ensemble.
    pub models: Vec<String>,
}

impl Default for TableLayout {
    fn default() -> Self {
        TableLayout {
            datasets: [
                "Original",
                "Wrapper top 5",
                "Wrapper top 10",
                "InfoGain top 5",
                "InfoGain top 10",
            ]
            .map(String::from)
            .to_vec(),
            models: ["SVM", "NN", "RF", "Proposed"].map(String::from).to_vec(),
        }
    }
}

impl TableLayout {
    pub fn original(&self) -> &str {
        &self.datasets[0]
    }

    pub fn proposed(&self) -> &str {
        self.models.last().expect("layout has models")
    }
}

/// CV results keyed by (dataset label, model label).
#[derive(Debug, Clone, Default)]
pub struct ResultGrid {
    cells: HashMap<(String, String), CvResult>,
}

impl ResultGrid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        dataset: impl Into<String>,
        model: impl Into<String>,
        result: CvResult,
    ) {
        self.cells.insert((dataset.into(), model.into()), result);
    }

    pub fn get(&self, dataset: &str, model: &str) -> Result<&CvResult> {
        self.cells
            .get(&(dataset.to_string(), model.to_string()))
            .ok_or_else(|| Error::MissingCell {
                dataset: dataset.to_string(),
                model: model.to_string(),
            })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Formats a table cell as `mean(std)` with three decimals.
pub fn format_cell(mean: Option<f64>, std: Option<f64>) -> String {
    match (mean, std) {
        (Some(m), Some(s)) => format!("{m:.3}({s:.3})"),
        (Some(m), None) => format!("{m:.3}(n/a)"),
        _ => "n/a".into(),
    }
}

fn fmt3(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.3}"))
}

fn fmt_full(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

/// A rendered table: header plus rows of display strings, with a CSV twin.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub csv: String,
}

impl Table {
    pub fn to_markdown(&self) -> String {
        let mut out = format!("### {}\n\n", self.title);
        let _ = writeln!(out, "| {} |", self.header.join(" | "));
        let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
        for row in &self.rows {
            let _ = writeln!(out, "| {} |", row.join(" | "));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reports {
    pub accuracy_grid: Table,
    pub best_vs_ensemble: Table,
    pub ensemble_on_subsets: Table,
    pub best_subset_accuracy: Table,
    /// Model with the highest mean accuracy on the original dataset,
    /// excluding the ensemble.
    pub best_single: String,
    pub best_subset: String,
}

const QUARTET: [Metric; 4] = [
    Metric::Accuracy,
    Metric::Recall,
    Metric::Precision,
    Metric::Auc,
];

pub fn summarize_tables(grid: &ResultGrid, layout: &TableLayout) -> Result<Reports> {
    // Completeness first so the error names the first missing cell.
    for d in &layout.datasets {
        for m in &layout.models {
            grid.get(d, m)?;
        }
    }

    let mut header = vec!["Dataset".to_string()];
    header.extend(layout.models.iter().cloned());
    let mut rows = Vec::new();
    let mut csv = String::from("dataset,model,accuracy_mean,accuracy_std,folds,cell\n");
    for d in &layout.datasets {
        let mut row = vec![d.clone()];
        for m in &layout.models {
            let s = grid.get(d, m)?.summary(Metric::Accuracy);
            let cell = format_cell(s.mean, s.std);
            let _ = writeln!(
                csv,
                "{d},{m},{},{},{},{cell}",
                fmt_full(s.mean),
                fmt_full(s.std),
                s.defined
            );
            row.push(cell);
        }
        rows.push(row);
    }
    let accuracy_grid = Table {
        title: "Accuracy of single classifiers and the ensemble, mean(std)".into(),
        header,
        rows,
        csv,
    };

    let original = layout.original();
    let proposed = layout.proposed();
    let singles = &layout.models[..layout.models.len() - 1];
    let mut best_single = singles[0].clone();
    let mut best_acc = f64::NEG_INFINITY;
    for m in singles {
        let acc = grid
            .get(original, m)?
            .mean(Metric::Accuracy)
            .unwrap_or(f64::NEG_INFINITY);
        if acc > best_acc {
            best_acc = acc;
            best_single = m.clone();
        }
    }

    let quartet_header = |first: &str| {
        let mut h = vec![first.to_string()];
        h.extend(QUARTET.iter().map(|m| m.label().to_string()));
        h
    };
    let quartet_csv_header = |first: &str| {
        format!(
            "{first},{}\n",
            QUARTET
                .iter()
                .map(|m| m.key())
                .collect::<Vec<_>>()
                .join(",")
        )
    };

    let mut rows = Vec::new();
    let mut csv = quartet_csv_header("model");
    for (label, model) in [
        (format!("Best single ({best_single})"), best_single.as_str()),
        ("Proposed".to_string(), proposed),
    ] {
        let r = grid.get(original, model)?;
        let means: Vec<Option<f64>> = QUARTET.iter().map(|&m| r.mean(m)).collect();
        let mut row = vec![label];
        row.extend(means.iter().map(|&v| fmt3(v)));
        rows.push(row);
        let _ = writeln!(
            csv,
            "{model},{}",
            means
                .iter()
                .map(|&v| fmt_full(v))
                .collect::<Vec<_>>()
                .join(",")
        );
    }
    let best_vs_ensemble = Table {
        title: format!("Best single classifier vs. ensemble on {original}"),
        header: quartet_header("Model"),
        rows,
        csv,
    };

    let mut rows = Vec::new();
    let mut csv = quartet_csv_header("dataset");
    let mut best_subset = layout
        .datasets
        .get(1)
        .cloned()
        .unwrap_or_else(|| original.to_string());
    let mut best_subset_acc = f64::NEG_INFINITY;
    for d in layout.datasets.iter().skip(1) {
        let r = grid.get(d, proposed)?;
        let means: Vec<Option<f64>> = QUARTET.iter().map(|&m| r.mean(m)).collect();
        let acc = means[0].unwrap_or(f64::NEG_INFINITY);
        if acc > best_subset_acc {
            best_subset_acc = acc;
            best_subset = d.clone();
        }
        let mut row = vec![d.clone()];
        row.extend(means.iter().map(|&v| fmt3(v)));
        rows.push(row);
        let _ = writeln!(
            csv,
            "{d},{}",
            means
                .iter()
                .map(|&v| fmt_full(v))
                .collect::<Vec<_>>()
                .join(",")
        );
    }
    let ensemble_on_subsets = Table {
        title: "Ensemble on selected-feature subdatasets".into(),
        header: quartet_header("Subdataset"),
        rows,
        csv,
    };

    let mut rows = Vec::new();
    let mut csv = String::from("dataset,model,accuracy_mean\n");
    for m in &layout.models {
        let acc = grid.get(&best_subset, m)?.mean(Metric::Accuracy);
        rows.push(vec![m.clone(), fmt3(acc)]);
        let _ = writeln!(csv, "{best_subset},{m},{}", fmt_full(acc));
    }
    let best_subset_accuracy = Table {
        title: format!("Accuracy on the best subdataset ({best_subset})"),
        header: vec!["Model".into(), "Accuracy".into()],
        rows,
        csv,
    };

    Ok(Reports {
        accuracy_grid,
        best_vs_ensemble,
        ensemble_on_subsets,
        best_subset_accuracy,
        best_single,
        best_subset,
    })
}

/// Per-fold raw results for every grid cell, in layout order.
pub fn folds_csv(grid: &ResultGrid, layout: &TableLayout) -> Result<String> {
    let mut out = String::from(
        "dataset,model,repeat,fold,n,tp,fp,tn,fn,accuracy,precision,recall,f_measure,auc\n",
    );
    let opt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x}"));
    for d in &layout.datasets {
        for m in &layout.models {
            for f in &grid.get(d, m)?.folds {
                let r = &f.metrics;
                let c = r.counts;
                let _ = writeln!(
                    out,
                    "{d},{m},{},{},{},{},{},{},{},{},{},{},{},{}",
                    f.repeat,
                    f.fold,
                    c.total(),
                    c.tp,
                    c.fp,
                    c.tn,
                    c.fn_,
                    opt(r.accuracy),
                    opt(r.precision),
                    opt(r.recall),
                    opt(r.f_measure),
                    opt(r.auc)
                );
            }
        }
    }
    Ok(out)
}
