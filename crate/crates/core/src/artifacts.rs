//! Serialized encoders and the config hash stamped on every JSON artifact.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::domains::Domain;
use crate::encoder::Encoder;
use crate::error::{Error, Result};
use crate::frontier::FrontierPoint;
use crate::joint::JointDistribution;
use crate::metrics;

/// Hex SHA-256 of the bytes that configured a run.
pub fn config_hash(config: &[u8]) -> String {
    Sha256::digest(config).iter().map(|b| format!("{b:02x}")).collect()
}

/// An abstraction as written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderRecord {
    /// Label of the reward the encoder was trained on.
    pub objective: String,
    /// Item set the encoder covers, e.g. `grid:5x5`.
    pub support: String,
    pub n_items: usize,
    pub n_clusters: usize,
    pub assignments: Vec<usize>,
    /// Mean training reward of each cluster.
    pub cluster_means: Vec<f64>,
    pub weight: f64,
    pub complexity_bits: f64,
    pub distortion_mse: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

impl EncoderRecord {
    /// Record of a frontier point trained on `domain`.
    pub fn from_point(point: &FrontierPoint, domain: &Domain, config_hash: Option<String>) -> Result<Self> {
        Ok(Self {
            objective: point.encoder.objective().to_string(),
            support: domain.signature(),
            n_items: point.encoder.n_items(),
            n_clusters: point.n_clusters,
            assignments: point.encoder.assignments().to_vec(),
            cluster_means: metrics::cluster_means(&point.encoder, &domain.rewards)?,
            weight: point.weight,
            complexity_bits: point.complexity_bits,
            distortion_mse: point.distortion_mse,
            config_hash,
        })
    }

    /// Rebuilds the encoder on `domain`'s items. Fails when the item sets differ.
    pub fn to_encoder(&self, domain: &Domain) -> Result<Encoder> {
        if self.support != domain.signature() {
            return Err(Error::mismatch(format!(
                "encoder covers {} but domain {} is {}",
                self.support,
                domain.spec.label(),
                domain.signature()
            )));
        }
        let joint: JointDistribution = domain.joint();
        Encoder::from_assignments(&joint, &self.assignments, self.objective.clone())
    }

    pub fn validate(&self) -> Result<()> {
        if self.assignments.len() != self.n_items {
            return Err(Error::validation(format!(
                "encoder lists {} assignments for {} items",
                self.assignments.len(),
                self.n_items
            )));
        }
        let distinct = self.assignments.iter().collect::<std::collections::BTreeSet<_>>().len();
        if distinct != self.n_clusters || self.cluster_means.len() != self.n_clusters {
            return Err(Error::validation(format!(
                "encoder declares {} clusters, assignments use {distinct} and {} means are listed",
                self.n_clusters,
                self.cluster_means.len()
            )));
        }
        if self.assignments.iter().any(|&z| z >= self.n_clusters) {
            return Err(Error::validation("cluster labels must be 0..n_clusters"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let record: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        record.validate()?;
        Ok(record)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }
}
