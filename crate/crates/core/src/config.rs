//! Pipeline configuration file.
//!
//! A JSON object; every key is optional and unknown keys are rejected:
//!
//! ```json
//! {
//!   "tau": 0.3,
//!   "handshape_prefilter": 0.8,
//!   "bands": [[2.4, null], [1.7, 2.4]],
//!   "clamp_floor": 1.0,
//!   "resample_len": 32,
//!   "wordvec_path": "vectors.txt",
//!   "corpus_path": "corpus.json"
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assign::{AssignConfig, DEFAULT_TAU};
use crate::corpus::RATING_MIN;
use crate::neighbors::{Band, RoundConfig};
use crate::sublexical::{ExtractConfig, DEFAULT_RESAMPLE_LEN};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub tau: f64,
    pub handshape_prefilter: f64,
    pub bands: Vec<Band>,
    pub clamp_floor: f64,
    pub resample_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wordvec_path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_path: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let rounds = RoundConfig::default();
        PipelineConfig {
            tau: DEFAULT_TAU,
            handshape_prefilter: rounds.handshape_prefilter,
            bands: rounds.bands,
            clamp_floor: RATING_MIN,
            resample_len: DEFAULT_RESAMPLE_LEN,
            wordvec_path: None,
            corpus_path: None,
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Load a config file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.wordvec_path, &mut cfg.corpus_path].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.assign_config().validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.resample_len < 2 {
            return Err(ConfigError::Invalid(format!("resample_len must be at least 2, got {}", self.resample_len)));
        }
        Ok(())
    }

    pub fn round_config(&self) -> RoundConfig {
        RoundConfig { handshape_prefilter: self.handshape_prefilter, bands: self.bands.clone() }
    }

    pub fn assign_config(&self) -> AssignConfig {
        AssignConfig { tau: self.tau, rounds: self.round_config(), clamp_floor: self.clamp_floor }
    }

    pub fn extract_config(&self) -> ExtractConfig {
        ExtractConfig { resample_len: self.resample_len }
    }
}
