mod common;

use common::{dataset, Recorder};
use drstack::ensemble::{Stacking, StackingSpec};
use drstack::learners::{
    ForestParams, Learner, LearnerSpec, LogisticParams, TrainedModel, TreeParams,
};
use drstack::{seed, train_stacking, TabularDataset};

fn fast_spec(seed: u64) -> StackingSpec {
    StackingSpec {
        base_specs: vec![
            LearnerSpec::Forest(ForestParams {
                tree_count: 5,
                ..Default::default()
            }),
            LearnerSpec::Tree(TreeParams {
                max_depth: 3,
                min_leaf: 3,
            }),
            LearnerSpec::Logistic(LogisticParams::default()),
        ],
        seed,
        ..Default::default()
    }
}

#[test]
fn single_calibrated_base_agrees_with_itself() {
    let train = drstack::synthetic::blobs(60, 2, 4.0, 1);
    let held_out = drstack::synthetic::blobs(100, 2, 4.0, 2);
    let base = LogisticParams::default();
    let spec = StackingSpec {
        base_specs: vec![LearnerSpec::Logistic(base)],
        seed: 3,
        ..Default::default()
    };
    let stacked = train_stacking(&train, &spec).unwrap();
    let alone = base.fit(&train, 0).unwrap();
    let agree = held_out
        .rows()
        .filter(|x| stacked.predict(x).unwrap().0 == alone.predict(x).unwrap())
        .count();
    assert!(
        agree as f64 / held_out.n_rows() as f64 >= 0.95,
        "agreement {agree}/200"
    );
}

#[test]
fn meta_features_are_out_of_fold() {
    let ds = drstack::synthetic::messidor_like(30, 35, 4);
    let rec = Recorder::new("rec");
    let stacking = Stacking::new(
        vec![Box::new(rec.clone())],
        Box::new(LogisticParams::default()),
        5,
    );
    let (_, report) = stacking.fit_with_report(&ds, 21).unwrap();
    let base_seed = seed::derive_str(21, "rec");
    let fits = rec.fits();
    assert_eq!(fits.len(), 6);
    for f in 0..5 {
        let (_, trained_on) = fits
            .iter()
            .find(|(s, _)| *s == seed::derive(base_seed, f as u64 + 1))
            .unwrap();
        let test = report.folds.test_rows(f);
        assert!(test.iter().all(|r| !trained_on.contains(r)));
        assert_eq!(trained_on.len() + test.len(), ds.n_rows());
        let sig = Recorder::signature(trained_on);
        for r in test {
            assert!((report.meta_features[r][0] - sig).abs() < 1e-12);
        }
    }
    let (_, full) = fits.iter().find(|(s, _)| *s == base_seed).unwrap();
    assert_eq!(full.len(), ds.n_rows());
}

#[test]
fn all_positive_bases_on_correlated_meta_predict_positive() {
    let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![f64::from(i % 2); 3]).collect();
    let labels: Vec<u8> = (0..20).map(|i| (i % 2) as u8).collect();
    let meta = LogisticParams::default()
        .fit(&dataset(rows, labels), 0)
        .unwrap();
    let TrainedModel::Logistic(m) = &meta else {
        panic!()
    };
    assert!(m.weights.iter().all(|&w| w > 0.0));
    assert_eq!(meta.predict(&[1.0, 1.0, 1.0]).unwrap(), 1);
}

#[test]
fn zero_meta_gives_half_and_positive_label() {
    let ds = drstack::synthetic::blobs(10, 2, 3.0, 5);
    let mut model = train_stacking(&ds, &fast_spec(1)).unwrap();
    let TrainedModel::Logistic(meta) = &mut model.meta else {
        panic!()
    };
    meta.weights.iter_mut().for_each(|w| *w = 0.0);
    meta.bias = 0.0;
    assert_eq!(model.predict(ds.row(0)).unwrap(), (1, 0.5));
    assert!(model.predict(&[0.0]).is_err());
}

#[test]
fn permuting_bases_permutes_meta_inputs() {
    let ds = drstack::synthetic::messidor_like(40, 45, 6);
    let spec = fast_spec(9);
    let mut permuted = spec.clone();
    permuted.base_specs = vec![
        spec.base_specs[2].clone(),
        spec.base_specs[0].clone(),
        spec.base_specs[1].clone(),
    ];
    let a = train_stacking(&ds, &spec).unwrap();
    let b = train_stacking(&ds, &permuted).unwrap();
    assert_eq!(b.base_names, ["logistic", "rf", "tree"]);
    assert_eq!(a.bases[0], b.bases[1]);
    assert_eq!(a.bases[1], b.bases[2]);
    assert_eq!(a.bases[2], b.bases[0]);
    let (TrainedModel::Logistic(ma), TrainedModel::Logistic(mb)) = (&a.meta, &b.meta) else {
        panic!()
    };
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        assert!((ma.weights[i] - mb.weights[j]).abs() < 1e-12);
    }
    for x in ds.rows() {
        assert!((a.predict_proba(x).unwrap() - b.predict_proba(x).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn stacking_is_deterministic_across_thread_counts() {
    let ds = drstack::synthetic::messidor_like(40, 40, 8);
    let spec = StackingSpec {
        seed: 4,
        ..Default::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| train_stacking(&ds, &spec).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(4));
    for x in ds.rows() {
        let p = one.predict_proba(x).unwrap();
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn stacked_document_round_trips() {
    let ds: TabularDataset = drstack::synthetic::messidor_like(20, 20, 2);
    let learner = fast_spec(0).build().unwrap();
    let model = learner.fit(&ds, 5).unwrap();
    let doc = drstack::ModelDocument::new(learner.spec(), 5, ds.feature_names().to_vec(), model);
    let back = drstack::ModelDocument::from_json(&doc.to_json().unwrap()).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.kind, "stacked");
}
