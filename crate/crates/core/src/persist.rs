//! Versioned JSON model documents.
//!
//! A document records the model kind, the learner configuration, the seed,
//! and the fitted parameters. Stacked models nest their base and meta models
//! inside the same document.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{LearnerSpec, TrainedModel};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u64,
    pub kind: String,
    pub spec: LearnerSpec,
    pub seed: u64,
    pub n_features: usize,
    pub feature_names: Vec<String>,
    pub model: TrainedModel,
}

impl ModelDocument {
    pub fn new(
        spec: LearnerSpec,
        seed: u64,
        feature_names: Vec<String>,
        model: TrainedModel,
    ) -> Self {
        ModelDocument {
            format_version: FORMAT_VERSION,
            kind: model.kind().to_string(),
            spec,
            seed,
            n_features: model.n_features(),
            feature_names,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a document, rejecting unknown format versions before looking
    /// at anything else.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::Document("missing format_version".into()))?;
        if version != FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: version,
                supported: FORMAT_VERSION,
            });
        }
        let doc: ModelDocument = serde_json::from_value(value)?;
        if doc.n_features != doc.model.n_features() {
            return Err(Error::Document(format!(
                "n_features {} disagrees with model ({})",
                doc.n_features,
                doc.model.n_features()
            )));
        }
        Ok(doc)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
