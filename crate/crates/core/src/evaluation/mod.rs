//! Confusion-matrix metrics, AUC, cross-validation and report tables.

pub mod cv;
pub mod metrics;
pub mod tables;

pub use cv::{cross_validate, CvProtocol, CvResult, FoldReport, MetricSummary, RepeatSeeding};
pub use metrics::{
    accuracy, auc, confusion_matrix, f_measure, precision, recall, ConfusionMatrix, Metric,
    MetricsReport,
};
pub use tables::{
    folds_csv, format_cell, summarize_tables, Reports, ResultGrid, Table, TableLayout,
};
