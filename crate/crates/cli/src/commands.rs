//! `rank`, `train`, `predict` and `evaluate`.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context};
use drstack::evaluation::{folds_csv, CvProtocol, Metric, ResultGrid, TableLayout};
use drstack::feature_selection::SelectedLearner;
use drstack::learners::TrainedModel;
use drstack::{
    cross_validate, load_path, load_unlabeled, seed, CvResult, FeatureRanking, LearnerRegistry,
    LearnerSpec, ModelDocument, SelectorRegistry, TabularDataset,
};

use crate::args::{EvaluateArgs, Method, PredictArgs, RankArgs, TrainArgs};
use crate::manifest::{output, write_file, DatasetRecord, Manifest};

/// Exit status classes.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    /// Invalid configurations are usage errors; everything else is a runtime failure.
    pub fn classify(e: anyhow::Error) -> Self {
        let usage = e.chain().any(|c| {
            matches!(
                c.downcast_ref::<drstack::Error>(),
                Some(
                    drstack::Error::TopKOutOfRange { .. }
                        | drstack::Error::Config(_)
                        | drstack::Error::UnknownLearner(_)
                        | drstack::Error::UnknownSelector(_)
                )
            )
        });
        if usage {
            Failure::Usage(e)
        } else {
            Failure::Runtime(e)
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Runtime(e) => e,
        }
    }
}

pub fn load_dataset(path: &Path) -> anyhow::Result<TabularDataset> {
    load_path(path).with_context(|| format!("loading dataset {}", path.display()))
}

/// Seed handed to a selector for a run seeded with `seed`.
pub fn selection_seed(seed: u64) -> u64 {
    seed::derive_str(seed, "select")
}

pub fn rank_features(
    ds: &TabularDataset,
    method: Method,
    top: usize,
    seed: u64,
) -> anyhow::Result<FeatureRanking> {
    let selector = SelectorRegistry::with_defaults().create(method.name())?;
    selector
        .rank(ds, top, selection_seed(seed))
        .with_context(|| format!("ranking features by {}", method.name()))
}

pub fn ranking_markdown(ranking: &FeatureRanking, names: &[String]) -> String {
    let mut s = format!(
        "# Feature ranking: {} top {}\n\n| Rank | Index | Feature | Score |\n|---:|---:|---|---:|\n",
        ranking.method.label(),
        ranking.ordered.len()
    );
    for (i, f) in ranking.ordered.iter().enumerate() {
        let _ = writeln!(
            s,
            "| {} | {} | {} | {:.6} |",
            i + 1,
            f.feature_index,
            names[f.feature_index],
            f.score
        );
    }
    s
}

/// Returns the ranking and its Markdown table.
pub fn rank(a: &RankArgs, threads: Option<usize>) -> anyhow::Result<(FeatureRanking, String)> {
    let d = &a.data;
    let ds = load_dataset(&d.data)?;
    let ranking = rank_features(&ds, a.method, a.top as usize, d.seed)?;
    let stem = format!("ranking_{}_top{}", a.method.name(), a.top);
    let mut manifest = Manifest::new(
        &crate::args::Command::Rank(a.clone()),
        Some(d.seed),
        threads,
    )?;
    manifest.dataset = Some(DatasetRecord::new(&d.data, &ds)?);
    let table = ranking_markdown(&ranking, ds.feature_names());
    for (name, body) in [
        (format!("{stem}.json"), ranking.to_json()? + "\n"),
        (format!("{stem}.md"), table.clone()),
    ] {
        let (path, rel) = output(&d.out, &name);
        write_file(&path, body)?;
        manifest.outputs.push(rel);
    }
    manifest.write(&d.out.join(format!("{stem}.manifest.json")))?;
    Ok((ranking, table))
}

fn learner_spec(model: &str, spec: Option<&Path>) -> anyhow::Result<LearnerSpec> {
    let spec = match spec {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading spec {}", p.display()))?;
            serde_json::from_str::<LearnerSpec>(&text).map_err(|e| {
                drstack::Error::Config(format!("invalid learner spec {}: {e}", p.display()))
            })?
        }
        None => LearnerRegistry::with_defaults().spec(model)?,
    };
    spec.validate()?;
    Ok(spec)
}

/// Number of SVMs (including those inside ensembles) that hit the iteration cap.
pub fn unconverged_svms(model: &TrainedModel) -> usize {
    match model {
        TrainedModel::Svm(m) => usize::from(!m.converged()),
        TrainedModel::Stacked(s) => s.bases.iter().chain([&s.meta]).map(unconverged_svms).sum(),
        TrainedModel::Projected(p) => unconverged_svms(&p.inner),
        _ => 0,
    }
}

pub fn train(a: &TrainArgs, threads: Option<usize>) -> anyhow::Result<ModelDocument> {
    let d = &a.data;
    let ds = load_dataset(&d.data)?;
    let spec = learner_spec(&a.model, a.spec.as_deref())?;
    let learner = spec.build()?;
    let model = learner
        .fit(&ds, d.seed)
        .with_context(|| format!("training {}", a.model))?;
    let n = unconverged_svms(&model);
    if n > 0 {
        eprintln!("warning: {n} SVM solve(s) stopped at the iteration cap before converging");
    }
    let doc = ModelDocument::new(spec, d.seed, ds.feature_names().to_vec(), model);
    let stem = format!("model_{}", a.model);
    let (path, rel) = output(&d.out, &format!("{stem}.json"));
    write_file(&path, doc.to_json()? + "\n")?;
    let mut manifest = Manifest::new(
        &crate::args::Command::Train(a.clone()),
        Some(d.seed),
        threads,
    )?;
    manifest.dataset = Some(DatasetRecord::new(&d.data, &ds)?);
    manifest.outputs.push(rel);
    manifest.write(&d.out.join(format!("{stem}.manifest.json")))?;
    Ok(doc)
}

pub fn predict(a: &PredictArgs, threads: Option<usize>) -> anyhow::Result<Vec<(u8, f64)>> {
    let doc = ModelDocument::load(&a.model_file)
        .with_context(|| format!("loading model {}", a.model_file.display()))?;
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let rows = load_unlabeled(file).with_context(|| format!("reading {}", a.input.display()))?;
    if let Some(first) = rows.first() {
        if first.len() != doc.n_features {
            return Err(drstack::Error::DimensionMismatch {
                expected: doc.n_features,
                found: first.len(),
            })
            .with_context(|| format!("input {} does not match the model", a.input.display()));
        }
    }
    let mut out = String::from("label,probability\n");
    let mut preds = Vec::with_capacity(rows.len());
    for row in &rows {
        let p = doc.model.predict_proba(row)?;
        let label = drstack::learners::threshold(p);
        let _ = writeln!(out, "{label},{p}");
        preds.push((label, p));
    }
    let (path, rel) = output(&a.out, "predictions.csv");
    write_file(&path, out)?;
    let mut manifest = Manifest::new(
        &crate::args::Command::Predict(a.clone()),
        Some(doc.seed),
        threads,
    )?;
    manifest.outputs.push(rel);
    manifest.notes.insert(
        "model_sha256".into(),
        crate::manifest::sha256_file(&a.model_file)?.into(),
    );
    manifest.notes.insert(
        "input_sha256".into(),
        crate::manifest::sha256_file(&a.input)?.into(),
    );
    manifest.write(&a.out.join("predictions.manifest.json"))?;
    Ok(preds)
}

pub fn summary_markdown(title: &str, r: &CvResult) -> String {
    let mut s = format!("# {title}\n\n| Metric | Mean | Std | Defined folds | Undefined folds |\n|---|---:|---:|---:|---:|\n");
    let f = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"));
    for m in Metric::ALL {
        let sm = r.summary(m);
        let _ = writeln!(
            s,
            "| {} | {} | {} | {} | {} |",
            m.label(),
            f(sm.mean),
            f(sm.std),
            sm.defined,
            sm.undefined
        );
    }
    s
}

pub fn evaluate(a: &EvaluateArgs, threads: Option<usize>) -> anyhow::Result<CvResult> {
    let d = &a.data;
    let ds = load_dataset(&d.data)?;
    let spec = learner_spec(&a.model, a.spec.as_deref())?;
    let mut label = a.model.clone();
    let protocol = CvProtocol::new(a.folds as usize, a.repeats as usize, d.seed);
    let result = match (a.method, a.top) {
        (Some(method), Some(top)) => {
            label.push_str(&format!("_{}_top{top}", method.name()));
            if a.strict_selection {
                label.push_str("_strict");
                let selector = SelectorRegistry::with_defaults().create(method.name())?;
                drstack::feature_selection::check_top_k(top as usize, ds.n_features())?;
                let learner = SelectedLearner::new(selector, top as usize, spec.build()?);
                cross_validate(&ds, &learner, &protocol)
            } else {
                let ranking = rank_features(&ds, method, top as usize, d.seed)?;
                let sub = ds.project_features(&ranking.indices())?;
                cross_validate(&sub, spec.build()?.as_ref(), &protocol)
            }
        }
        (None, None) => cross_validate(&ds, spec.build()?.as_ref(), &protocol),
        _ => bail!(drstack::Error::Config(
            "--method and --top go together".into()
        )),
    }
    .with_context(|| format!("cross-validating {label}"))?;

    let stem = format!("cv_{label}");
    let mut grid = ResultGrid::new();
    grid.insert("data", label.as_str(), result.clone());
    let layout = TableLayout {
        datasets: vec!["data".into()],
        models: vec![label.clone()],
    };
    let mut manifest = Manifest::new(
        &crate::args::Command::Evaluate(a.clone()),
        Some(d.seed),
        threads,
    )?;
    manifest.dataset = Some(DatasetRecord::new(&d.data, &ds)?);
    for (name, body) in [
        (
            format!("{stem}.json"),
            serde_json::to_string_pretty(&result)? + "\n",
        ),
        (format!("{stem}_folds.csv"), folds_csv(&grid, &layout)?),
        (
            format!("{stem}.md"),
            summary_markdown(&format!("Cross-validation of {label}"), &result),
        ),
    ] {
        let (path, rel) = output(&d.out, &name);
        write_file(&path, body)?;
        manifest.outputs.push(rel);
    }
    manifest.write(&d.out.join(format!("{stem}.manifest.json")))?;
    Ok(result)
}
