//! Pipeline configuration: a TOML document with documented keys.
//!
//! `seed` and `corpus.path` are required; every other key has a default
//! matching the analysis defaults (K=10 clusters, 10 topics per cluster,
//! 100-dimensional embeddings, t-SNE perplexity 100 / early exaggeration
//! 12). Unknown keys are rejected by name. Environment variables are
//! never consulted.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusSchema, LoadMode};
use crate::embedding::{CbowMode, WindowWeighting};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Master seed; every stage derives its own stream from it.
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads for per-document parallel stages; 1 is the
    /// determinism-guaranteed mode used by tests.
    #[serde(default = "default_threads")]
    pub threads: usize,
    pub corpus: CorpusSection,
    #[serde(default)]
    pub preprocess: PreprocessSection,
    #[serde(default)]
    pub embedding: EmbeddingSection,
    #[serde(default)]
    pub cluster: ClusterSection,
    #[serde(default)]
    pub topics: TopicsSection,
    #[serde(default)]
    pub tsne: TsneSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSection {
    pub path: PathBuf,
    #[serde(default)]
    pub venue_label: Option<String>,
    #[serde(default = "default_mode")]
    pub mode: LoadMode,
    #[serde(default)]
    pub columns: CorpusSchema,
}

fn default_mode() -> LoadMode {
    LoadMode::Strict
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessSection {
    /// Plain-text stopword list; the bundled English list when unset.
    pub stopwords_path: Option<PathBuf>,
    /// Plain-text lexicon; the bundled lexicon when unset.
    pub lexicon_path: Option<PathBuf>,
    pub pos_filter: bool,
    pub phrase_min_count: u64,
    pub phrase_threshold: f64,
    pub min_doc_freq: u64,
}

impl Default for PreprocessSection {
    fn default() -> Self {
        PreprocessSection {
            stopwords_path: None,
            lexicon_path: None,
            pos_filter: false,
            phrase_min_count: 5,
            phrase_threshold: 10.0,
            min_doc_freq: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingMethod {
    Tfidf,
    Pubg,
    Pubw,
}

impl EmbeddingMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingMethod::Tfidf => "tfidf",
            EmbeddingMethod::Pubg => "pubg",
            EmbeddingMethod::Pubw => "pubw",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbeddingSection {
    pub method: EmbeddingMethod,
    /// Dense embedding dimensionality (ignored by tfidf).
    pub dim: usize,
    pub pubg: PubgSection,
    pub pubw: PubwSection,
}

impl Default for EmbeddingSection {
    fn default() -> Self {
        EmbeddingSection {
            method: EmbeddingMethod::Pubg,
            dim: 100,
            pubg: PubgSection::default(),
            pubw: PubwSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PubgSection {
    pub epochs: usize,
    pub learning_rate: f64,
    pub x_max: f64,
    pub alpha: f64,
    pub window: usize,
    pub weighting: WindowWeighting,
}

impl Default for PubgSection {
    fn default() -> Self {
        PubgSection {
            epochs: 25,
            learning_rate: 0.05,
            x_max: 100.0,
            alpha: 0.75,
            window: 10,
            weighting: WindowWeighting::InverseDistance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PubwSection {
    pub epochs: usize,
    pub learning_rate: f64,
    pub window: usize,
    pub negatives: usize,
    pub mode: CbowMode,
}

impl Default for PubwSection {
    fn default() -> Self {
        PubwSection {
            epochs: 5,
            learning_rate: 0.025,
            window: 5,
            negatives: 5,
            mode: CbowMode::NegativeSampling,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClusterSection {
    pub k: usize,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Optional inclusive K range for an elbow scan recorded alongside the
    /// cluster artifact.
    pub elbow_range: Option<(usize, usize)>,
}

impl Default for ClusterSection {
    fn default() -> Self {
        ClusterSection {
            k: 10,
            restarts: 10,
            max_iter: 300,
            tol: 1e-6,
            elbow_range: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopicsSection {
    /// Topics fitted independently within each cluster.
    pub per_cluster: usize,
    /// 0 selects the 50/K default.
    pub alpha: f64,
    pub eta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub n_top: usize,
}

impl Default for TopicsSection {
    fn default() -> Self {
        TopicsSection {
            per_cluster: 10,
            alpha: 0.0,
            eta: 0.01,
            iterations: 1000,
            burn_in: 500,
            n_top: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TsneSection {
    pub perplexity: f64,
    pub early_exaggeration: f64,
    pub iterations: usize,
    pub learning_rate: f64,
}

impl Default for TsneSection {
    fn default() -> Self {
        TsneSection {
            perplexity: 100.0,
            early_exaggeration: 12.0,
            iterations: 1000,
            learning_rate: 200.0,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<PipelineConfig> {
        let config: PipelineConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Checks cross-field constraints and that referenced paths exist.
    pub fn validate(&self) -> Result<()> {
        if self.threads < 1 {
            return Err(Error::Config("threads must be ≥ 1".into()));
        }
        if !self.corpus.path.exists() {
            return Err(Error::Config(format!(
                "corpus path {} does not exist",
                self.corpus.path.display()
            )));
        }
        for (label, path) in [
            ("stopwords_path", &self.preprocess.stopwords_path),
            ("lexicon_path", &self.preprocess.lexicon_path),
        ] {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(Error::Config(format!(
                        "{label} {} does not exist",
                        p.display()
                    )));
                }
            }
        }
        if let Some((lo, hi)) = self.cluster.elbow_range {
            if lo < 1 || hi < lo + 2 {
                return Err(Error::Config(
                    "elbow_range needs at least 3 K values".into(),
                ));
            }
        }
        if self.topics.burn_in >= self.topics.iterations {
            return Err(Error::Config("topics.burn_in must be < iterations".into()));
        }
        Ok(())
    }

    /// Deterministic snapshot embedded in run manifests.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Loads, parses, validates, and fills defaults.
pub fn load_config(path: &Path) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
    PipelineConfig::from_toml_str(&text)
}
