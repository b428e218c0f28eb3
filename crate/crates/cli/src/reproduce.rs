//! The end-to-end grid: rank features both ways, build the four
//! subdatasets, cross-validate every model on every dataset, and write the
//! report tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use drstack::evaluation::{
    folds_csv, summarize_tables, CvProtocol, Metric, Reports, ResultGrid, TableLayout,
};
use drstack::feature_selection::{check_top_k, SelectedLearner};
use drstack::{
    cross_validate, FeatureRanking, Learner, LearnerRegistry, SelectorRegistry, TabularDataset,
};
use rayon::prelude::*;

use crate::args::{Command, Method, ReproduceArgs};
use crate::commands::{load_dataset, rank_features, ranking_markdown};
use crate::manifest::{write_file, DatasetRecord, Manifest};

/// Derived subdatasets in table order.
pub const SUBSETS: [(Method, usize, &str); 4] = [
    (Method::Wrapper, 5, "Wrapper top 5"),
    (Method::Wrapper, 10, "Wrapper top 10"),
    (Method::Infogain, 5, "InfoGain top 5"),
    (Method::Infogain, 10, "InfoGain top 10"),
];

/// Table label and registry name of each evaluated model; the ensemble last.
pub const MODELS: [(&str, &str); 4] = [
    ("SVM", "svm"),
    ("NN", "nn"),
    ("RF", "rf"),
    ("Proposed", "stack"),
];

pub const FAILED_MARKER: &str = "FAILED";

pub struct Outcome {
    pub grid: ResultGrid,
    pub reports: Reports,
    pub layout: TableLayout,
    pub rankings: Vec<(String, FeatureRanking)>,
    pub out: PathBuf,
}

/// Output file names; strict runs get a `_strict` suffix so both kinds of
/// run can share a directory.
pub fn file_name(stem: &str, ext: &str, strict: bool) -> String {
    if strict {
        format!("{stem}_strict.{ext}")
    } else {
        format!("{stem}.{ext}")
    }
}

pub fn reproduce(a: &ReproduceArgs, threads: Option<usize>) -> anyhow::Result<Outcome> {
    let out = &a.data.out;
    let marker = out.join(file_name(FAILED_MARKER, "txt", a.strict_selection));
    if marker.exists() {
        fs::remove_file(&marker).with_context(|| format!("removing stale {}", marker.display()))?;
    }
    let mut stage = "load";
    let result = run(a, threads, &mut stage);
    if let Err(e) = &result {
        let _ = write_file(&marker, format!("stage: {stage}\nerror: {e:#}\n"));
    }
    result.with_context(|| format!("reproduce failed at stage '{stage}'"))
}

fn subset_key(method: Method, k: usize) -> String {
    format!("{}_top{k}", method.name())
}

fn run(
    a: &ReproduceArgs,
    threads: Option<usize>,
    stage: &mut &'static str,
) -> anyhow::Result<Outcome> {
    let started = Instant::now();
    let d = &a.data;
    let out = d.out.as_path();
    let strict = a.strict_selection;
    let mut manifest = Manifest::new(&Command::Reproduce(a.clone()), Some(d.seed), threads)?;
    let emit = |manifest: &mut Manifest, name: String, body: String| -> anyhow::Result<()> {
        write_file(&out.join(&name), body)?;
        manifest.outputs.push(name);
        Ok(())
    };

    *stage = "load";
    let ds = load_dataset(&d.data)?;
    manifest.dataset = Some(DatasetRecord::new(&d.data, &ds)?);
    eprintln!("[load] {} rows, {} features", ds.n_rows(), ds.n_features());

    *stage = "select";
    let mut rankings = Vec::new();
    let mut datasets: BTreeMap<String, TabularDataset> = BTreeMap::new();
    for (method, k, label) in SUBSETS {
        check_top_k(k, ds.n_features()).with_context(|| format!("building {label}"))?;
        let ranking = rank_features(&ds, method, k, d.seed)?;
        let key = subset_key(method, k);
        let sub = ds.project_features(&ranking.indices())?;
        emit(
            &mut manifest,
            format!("rankings/{key}.json"),
            ranking.to_json()? + "\n",
        )?;
        emit(
            &mut manifest,
            format!("rankings/{key}.md"),
            ranking_markdown(&ranking, ds.feature_names()),
        )?;
        let mut csv = Vec::new();
        sub.write_csv(&mut csv)?;
        emit(
            &mut manifest,
            format!("subdatasets/{key}.csv"),
            String::from_utf8(csv)?,
        )?;
        manifest.notes.insert(
            format!("{key}_features"),
            serde_json::to_value(ranking.indices())?,
        );
        eprintln!("[select] {label}: {:?}", ranking.indices());
        datasets.insert(label.to_string(), sub);
        rankings.push((label.to_string(), ranking));
    }

    *stage = "evaluate";
    let layout = TableLayout::default();
    let registry = LearnerRegistry::with_defaults();
    let selectors = SelectorRegistry::with_defaults();
    let protocol = CvProtocol::new(a.folds as usize, a.repeats as usize, d.seed);
    let mut cells: Vec<(String, String, &TabularDataset, Box<dyn Learner>)> = Vec::new();
    for (i, dataset) in layout.datasets.iter().enumerate() {
        for (label, name) in MODELS {
            let inner = registry.create(name)?;
            let cell = if i == 0 {
                (dataset.clone(), label.to_string(), &ds, inner)
            } else if strict {
                let (method, k, _) = SUBSETS[i - 1];
                let learner: Box<dyn Learner> = Box::new(SelectedLearner::new(
                    selectors.create(method.name())?,
                    k,
                    inner,
                ));
                (dataset.clone(), label.to_string(), &ds, learner)
            } else {
                (
                    dataset.clone(),
                    label.to_string(),
                    &datasets[dataset],
                    inner,
                )
            };
            cells.push(cell);
        }
    }
    let results = cells
        .par_iter()
        .map(|(dataset, model, data, learner)| {
            let t = Instant::now();
            let r = cross_validate(data, learner.as_ref(), &protocol)
                .with_context(|| format!("cross-validating {model} on {dataset}"))?;
            eprintln!(
                "[evaluate] {dataset} / {model}: accuracy {:.4} ({:.1}s)",
                r.mean(Metric::Accuracy).unwrap_or(f64::NAN),
                t.elapsed().as_secs_f64()
            );
            Ok(r)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut grid = ResultGrid::new();
    for ((dataset, model, _, _), r) in cells.iter().zip(results) {
        grid.insert(dataset.clone(), model.clone(), r);
    }

    *stage = "report";
    let reports = summarize_tables(&grid, &layout)?;
    let tables = [
        ("table1", &reports.accuracy_grid),
        ("table2", &reports.best_vs_ensemble),
        ("table3", &reports.ensemble_on_subsets),
        ("figure4", &reports.best_subset_accuracy),
    ];
    let mut summary = String::from("# Reproduction report\n\n");
    if strict {
        summary.push_str("Feature selection rerun inside every training fold.\n\n");
    }
    for (stem, table) in tables {
        emit(
            &mut manifest,
            file_name(stem, "md", strict),
            table.to_markdown(),
        )?;
        emit(
            &mut manifest,
            file_name(stem, "csv", strict),
            table.csv.clone(),
        )?;
        summary.push_str(&table.to_markdown());
        summary.push('\n');
    }
    summary.push_str(&format!(
        "Best single classifier: {}\n\nBest subdataset for the ensemble: {}\n",
        reports.best_single, reports.best_subset
    ));
    emit(
        &mut manifest,
        file_name("folds", "csv", strict),
        folds_csv(&grid, &layout)?,
    )?;
    emit(&mut manifest, file_name("summary", "md", strict), summary)?;
    manifest
        .notes
        .insert("best_single".into(), reports.best_single.clone().into());
    manifest
        .notes
        .insert("best_subset".into(), reports.best_subset.clone().into());
    manifest.write(&out.join(file_name("manifest", "json", strict)))?;
    eprintln!(
        "[report] done in {:.1}s, outputs in {}",
        started.elapsed().as_secs_f64(),
        out.display()
    );

    Ok(Outcome {
        grid,
        reports,
        layout,
        rankings,
        out: out.to_path_buf(),
    })
}

/// Paths of the CSV reports a run writes, for comparing runs.
pub fn csv_reports(out: &Path, strict: bool) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = ["table1", "table2", "table3", "figure4", "folds"]
        .iter()
        .map(|s| out.join(file_name(s, "csv", strict)))
        .collect();
    for (method, k, _) in SUBSETS {
        v.push(out.join(format!("subdatasets/{}.csv", subset_key(method, k))));
    }
    v
}
