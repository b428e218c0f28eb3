//! Run manifests: what ran, on which bytes, with which seed.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use drstack::TabularDataset;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub path: String,
    pub sha256: String,
    pub n_rows: usize,
    pub n_features: usize,
    pub class_counts: [usize; 2],
}

impl DatasetRecord {
    pub fn new(path: &Path, ds: &TabularDataset) -> anyhow::Result<Self> {
        let c = ds.class_distribution();
        Ok(DatasetRecord {
            path: path.display().to_string(),
            sha256: sha256_file(path)?,
            n_rows: ds.n_rows(),
            n_features: ds.n_features(),
            class_counts: [c.negative, c.positive],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub model_format_version: u64,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// The parsed command line.
    pub config: serde_json::Value,
    pub dataset: Option<DatasetRecord>,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub notes: serde_json::Map<String, serde_json::Value>,
}

impl Manifest {
    pub fn new(
        config: &impl Serialize,
        seed: Option<u64>,
        threads: Option<usize>,
    ) -> anyhow::Result<Self> {
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            model_format_version: drstack::persist::FORMAT_VERSION,
            seed,
            threads,
            config: serde_json::to_value(config)?,
            dataset: None,
            outputs: Vec::new(),
            notes: serde_json::Map::new(),
        })
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        write_file(path, serde_json::to_string_pretty(self)? + "\n")
    }
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// `dir/name` as a string relative to `dir`, for manifest listings.
pub fn output(dir: &Path, name: &str) -> (PathBuf, String) {
    (dir.join(name), name.to_string())
}
