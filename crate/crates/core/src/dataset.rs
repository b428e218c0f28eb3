//! Loading, validation, slicing and stratified fold construction for binary
//! tabular datasets.
//!
//! The expected layout is one instance per line, numeric features followed by
//! a final `0`/`1` class label. ARFF files (numeric attributes plus a `{0,1}`
//! class) are accepted too: the header declarations are read for feature
//! names and the `@data` section is parsed with the CSV rules.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

/// Where a dataset came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub n_rows: usize,
}

/// Immutable numeric feature matrix with binary labels.
///
/// Rows carry a stable `row_id` (their index in the originally loaded data)
/// that survives row subsetting and column projection, so any downstream
/// stage can report exactly which source rows it saw.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    features: Vec<f64>,
    n_features: usize,
    labels: Vec<u8>,
    feature_names: Vec<String>,
    row_ids: Vec<usize>,
    provenance: Provenance,
}

/// Per-class row counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub negative: usize,
    pub positive: usize,
}

impl ClassCounts {
    pub fn of(labels: &[u8]) -> Self {
        let positive = labels.iter().filter(|&&y| y == 1).count();
        ClassCounts {
            negative: labels.len() - positive,
            positive,
        }
    }

    pub fn total(&self) -> usize {
        self.negative + self.positive
    }

    pub fn get(&self, class: u8) -> usize {
        if class == 0 {
            self.negative
        } else {
            self.positive
        }
    }

    /// Majority class, ties to class 1.
    pub fn majority(&self) -> u8 {
        u8::from(self.positive >= self.negative)
    }
}

impl TabularDataset {
    /// Builds a dataset from row vectors, validating every invariant.
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let n_features = feature_names.len();
        let mut features = Vec::with_capacity(rows.len() * n_features);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n_features {
                return Err(Error::RaggedRow {
                    row: r,
                    expected: n_features,
                    found: row.len(),
                });
            }
            features.extend(row);
        }
        Self::from_flat(features, labels, feature_names)
    }

    /// Builds a dataset from a row-major feature buffer.
    pub fn from_flat(
        features: Vec<f64>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n_rows = labels.len();
        let n_features = feature_names.len();
        if features.len() != n_rows * n_features {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: n_rows * n_features,
            });
        }
        for (r, &y) in labels.iter().enumerate() {
            if y > 1 {
                return Err(Error::BadLabel {
                    row: r,
                    value: y.to_string(),
                });
            }
        }
        if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n_features.max(1),
                column: pos % n_features.max(1),
            });
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        Ok(TabularDataset {
            features,
            n_features,
            labels,
            feature_names,
            row_ids: (0..n_rows).collect(),
            provenance: Provenance {
                source: "<memory>".into(),
                n_rows,
            },
        })
    }

    /// Default feature names `f0, f1, ...`.
    pub fn default_names(n: usize) -> Vec<String> {
        (0..n).map(|j| format!("f{j}")).collect()
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.provenance = Provenance {
            source: source.into(),
            n_rows: self.n_rows(),
        };
        self
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.features[row * self.n_features + feature]
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.value(i, feature)).collect()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Source-row identity of every row.
    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn class_distribution(&self) -> ClassCounts {
        ClassCounts::of(&self.labels)
    }

    /// New dataset holding the given rows, in the given order.
    pub fn subset_rows(&self, rows: &[usize]) -> TabularDataset {
        let mut features = Vec::with_capacity(rows.len() * self.n_features);
        let mut labels = Vec::with_capacity(rows.len());
        let mut row_ids = Vec::with_capacity(rows.len());
        for &r in rows {
            features.extend_from_slice(self.row(r));
            labels.push(self.labels[r]);
            row_ids.push(self.row_ids[r]);
        }
        TabularDataset {
            features,
            n_features: self.n_features,
            labels,
            feature_names: self.feature_names.clone(),
            row_ids,
            provenance: self.provenance.clone(),
        }
    }

    /// New dataset whose columns are `indices`, in that order.
    pub fn project_features(&self, indices: &[usize]) -> Result<TabularDataset> {
        let mut seen = HashSet::new();
        for &j in indices {
            if j >= self.n_features {
                return Err(Error::IndexOutOfRange {
                    index: j,
                    n_features: self.n_features,
                });
            }
            if !seen.insert(j) {
                return Err(Error::DuplicateIndex(j));
            }
        }
        let mut features = Vec::with_capacity(self.n_rows() * indices.len());
        for row in self.rows() {
            features.extend(indices.iter().map(|&j| row[j]));
        }
        Ok(TabularDataset {
            features,
            n_features: indices.len(),
            labels: self.labels.clone(),
            feature_names: indices
                .iter()
                .map(|&j| self.feature_names[j].clone())
                .collect(),
            row_ids: self.row_ids.clone(),
            provenance: self.provenance.clone(),
        })
    }

    /// Writes the dataset as CSV with a header line; floats use the shortest
    /// representation that parses back to the same bits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let mut header = self.feature_names.join(",");
        header.push_str(",class");
        writeln!(out, "{header}")?;
        for (row, y) in self.rows().zip(&self.labels) {
            let mut line = String::new();
            for v in row {
                line.push_str(&format!("{v:?}"));
                line.push(',');
            }
            line.push_str(&y.to_string());
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

fn parse_cell(raw: &str, row: usize, column: usize) -> Result<f64> {
    let v: f64 = raw.trim().parse().map_err(|_| Error::NonNumeric {
        row,
        column,
        value: raw.to_string(),
    })?;
    if !v.is_finite() {
        return Err(Error::NonFinite { row, column });
    }
    Ok(v)
}

fn parse_label(raw: &str, row: usize) -> Result<u8> {
    let t = raw.trim();
    match t.parse::<f64>() {
        Ok(v) if v == 0.0 => Ok(0),
        Ok(v) if v == 1.0 => Ok(1),
        _ => Err(Error::BadLabel {
            row,
            value: t.to_string(),
        }),
    }
}

/// Parses CSV records (no header) into a dataset. `names` fixes the feature
/// count when given; otherwise the first row decides it.
fn parse_records<R: Read>(reader: R, names: Option<Vec<String>>) -> Result<TabularDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'%'))
        .from_reader(reader);
    let mut expected = names.as_ref().map(|n| n.len() + 1);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (r, rec) in rdr.records().enumerate() {
        let rec =
            rec.map_err(|e| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let width = *expected.get_or_insert(rec.len());
        if rec.len() != width {
            return Err(Error::RaggedRow {
                row: r,
                expected: width,
                found: rec.len(),
            });
        }
        if width < 2 {
            return Err(Error::RaggedRow {
                row: r,
                expected: 2,
                found: width,
            });
        }
        for c in 0..width - 1 {
            features.push(parse_cell(&rec[c], r, c)?);
        }
        labels.push(parse_label(&rec[width - 1], r)?);
    }
    if labels.is_empty() {
        return Err(Error::EmptyData);
    }
    let n_features = expected.unwrap_or(1) - 1;
    let names = names.unwrap_or_else(|| TabularDataset::default_names(n_features));
    TabularDataset::from_flat(features, labels, names)
}

/// Loads comma-separated data; the last column is the class label.
pub fn load_csv<R: Read>(reader: R, has_header: bool) -> Result<TabularDataset> {
    let mut buf = BufReader::new(reader);
    let names = if has_header {
        let mut line = String::new();
        if buf.read_line(&mut line)? == 0 {
            return Err(Error::EmptyData);
        }
        let mut cols: Vec<String> = line
            .trim_end_matches(['\r', '\n'])
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        cols.pop();
        Some(cols)
    } else {
        None
    };
    parse_records(buf, names)
}

/// Reads unlabeled feature rows. A first line with any non-numeric cell is
/// taken as a header and skipped. Empty input gives no rows.
pub fn load_unlabeled<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'%'))
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (r, rec) in rdr.records().enumerate() {
        let rec =
            rec.map_err(|e| Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?;
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if r == 0 && rec.iter().any(|c| c.parse::<f64>().is_err()) {
            continue;
        }
        let w = *width.get_or_insert(rec.len());
        if rec.len() != w {
            return Err(Error::RaggedRow {
                row: r,
                expected: w,
                found: rec.len(),
            });
        }
        rows.push(
            rec.iter()
                .enumerate()
                .map(|(c, v)| parse_cell(v, r, c))
                .collect::<Result<_>>()?,
        );
    }
    Ok(rows)
}

/// Loads ARFF content with numeric attributes and a trailing `{0,1}` class.
/// Nominal attributes whose values are all numbers are read as numeric.
pub fn load_arff<R: Read>(reader: R) -> Result<TabularDataset> {
    let mut buf = BufReader::new(reader);
    let mut attributes: Vec<(String, String)> = Vec::new();
    let mut line = String::new();
    loop {
        line.clear();
        if buf.read_line(&mut line)? == 0 {
            return Err(Error::Arff("missing @data section".into()));
        }
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let lower = t.to_ascii_lowercase();
        if lower.starts_with("@data") {
            break;
        }
        if lower.starts_with("@attribute") {
            let rest = t["@attribute".len()..].trim();
            let (name, kind) = split_attribute(rest)?;
            attributes.push((name, kind));
        }
    }
    let Some((_, class_kind)) = attributes.pop() else {
        return Err(Error::Arff("no attributes declared".into()));
    };
    let class_set: Vec<String> = class_kind
        .trim_matches(|c| c == '{' || c == '}')
        .split(',')
        .map(|s| s.trim().trim_matches(['\'', '"']).to_string())
        .collect();
    let binary = class_kind.starts_with('{') && {
        let mut s = class_set.clone();
        s.sort();
        s == ["0", "1"]
    };
    if !binary {
        return Err(Error::Arff(format!(
            "class attribute must be {{0,1}}, found {class_kind}"
        )));
    }
    let mut names = Vec::with_capacity(attributes.len());
    for (name, kind) in attributes {
        let k = kind.to_ascii_lowercase();
        let numeric_codes = k.starts_with('{')
            && k.trim_matches(|c| c == '{' || c == '}')
                .split(',')
                .all(|v| v.trim().trim_matches(['\'', '"']).parse::<f64>().is_ok());
        if !(k == "numeric" || k == "real" || k == "integer" || numeric_codes) {
            return Err(Error::Arff(format!(
                "attribute {name:?} is not numeric ({kind})"
            )));
        }
        names.push(name);
    }
    parse_records(buf, Some(names))
}

fn split_attribute(rest: &str) -> Result<(String, String)> {
    let (name, tail) = if let Some(q) = rest.chars().next().filter(|c| *c == '\'' || *c == '"') {
        let end = rest[1..]
            .find(q)
            .ok_or_else(|| Error::Arff(format!("unterminated attribute name in {rest:?}")))?;
        (rest[1..1 + end].to_string(), &rest[end + 2..])
    } else {
        let mut it = rest.splitn(2, char::is_whitespace);
        let name = it.next().unwrap_or_default().to_string();
        (name, it.next().unwrap_or_default())
    };
    Ok((name, tail.trim().to_string()))
}

/// Loads a file, choosing ARFF or CSV by content. CSV headers are detected
/// by whether the first line parses as numbers.
pub fn load_path(path: impl AsRef<Path>) -> Result<TabularDataset> {
    let path = path.as_ref();
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('%'))
        .unwrap_or_default();
    let ds = if first.to_ascii_lowercase().starts_with("@relation")
        || first.to_ascii_lowercase().starts_with("@attribute")
    {
        load_arff(text.as_bytes())?
    } else {
        let has_header = first.split(',').any(|c| c.trim().parse::<f64>().is_err());
        load_csv(text.as_bytes(), has_header)?
    };
    Ok(ds.with_source(path.display().to_string()))
}

/// Stratified assignment of rows to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    fold_of_row: Vec<usize>,
    k: usize,
    seed: u64,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fold_of_row(&self) -> &[usize] {
        &self.fold_of_row
    }

    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of_row.len())
            .filter(|&i| self.fold_of_row[i] == fold)
            .collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of_row.len())
            .filter(|&i| self.fold_of_row[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of_row {
            sizes[f] += 1;
        }
        sizes
    }

    /// `counts[fold][class]`.
    pub fn class_counts(&self, labels: &[u8]) -> Vec<[usize; 2]> {
        let mut counts = vec![[0usize; 2]; self.k];
        for (&f, &y) in self.fold_of_row.iter().zip(labels) {
            counts[f][y as usize] += 1;
        }
        counts
    }
}

/// Shuffles each class's rows with the seeded generator and deals them
/// round-robin into `k` folds. Class 1 continues dealing where class 0
/// stopped, which keeps total fold sizes within one of each other.
pub fn stratified_k_folds(labels: &[u8], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::FoldCount(k));
    }
    let counts = ClassCounts::of(labels);
    for class in 0..2u8 {
        if counts.get(class) < k {
            return Err(Error::ClassTooSmall {
                class,
                count: counts.get(class),
                k,
            });
        }
    }
    let mut rng = seed::rng(seed);
    let mut fold_of_row = vec![0; labels.len()];
    let mut next = 0;
    for class in 0..2u8 {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            fold_of_row[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment {
        fold_of_row,
        k,
        seed,
    })
}
