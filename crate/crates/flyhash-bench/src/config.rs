//! Experiment manifests: a TOML document describing the full grid, with
//! every key overridable from the command line as `--key=value` using
//! dotted paths (e.g. `--eval.num_queries=200`).

use std::path::Path;

use flyhash_core::similarity::Measure;
use flyhash_core::PreprocessSpec;
use serde::Deserialize;

use crate::error::BenchError;
use crate::ingest::SourceSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub source: SourceSpec,
    /// Preprocessing names: none, original, mean_center, l2_normalize,
    /// center_normalize.
    pub preprocess: Vec<String>,
    /// Target component mean for the `original` preprocessing.
    #[serde(default = "default_original_r")]
    pub original_r: f64,
    pub projection: ProjectionGrid,
    /// Sparsifier names: kwta_real, kwta_binary, kwta_real_l2,
    /// block_binary, block_binary_matching_bits.
    #[serde(default)]
    pub sparsifiers: Vec<String>,
    pub eval: EvalGrid,
    /// Ranking scenarios: euc_euc, ang_ang.
    pub scenarios: Vec<String>,
    /// Embedding density levels (active component counts).
    #[serde(default)]
    pub k: Vec<usize>,
    /// Sequential block-processing mode; when present the sparsifier and
    /// k lists are ignored.
    #[serde(default)]
    pub sequential: Option<SequentialSpec>,
    pub master_seed: u64,
}

fn default_original_r() -> f64 {
    PreprocessSpec::DEFAULT_R
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionGrid {
    /// binomial, hypergeo_rows, hypergeo_cols.
    pub distributions: Vec<String>,
    pub densities: Vec<f64>,
    #[serde(default)]
    pub d_rule: DimensionRule,
}

/// How the embedding dimensionality D is derived from k.
#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum DimensionRule {
    /// D = factor * k.
    MultipleOfK { factor: usize },
    /// D fixed regardless of k.
    Fixed { dim: usize },
}

impl Default for DimensionRule {
    fn default() -> Self {
        DimensionRule::MultipleOfK { factor: 20 }
    }
}

impl DimensionRule {
    pub fn output_dim(&self, k: usize) -> usize {
        match *self {
            DimensionRule::MultipleOfK { factor } => factor * k,
            DimensionRule::Fixed { dim } => dim,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EvalGrid {
    #[serde(default = "default_k_at")]
    pub k_at: usize,
    #[serde(default = "default_num_queries")]
    pub num_queries: usize,
    #[serde(default = "default_num_realizations")]
    pub num_realizations: usize,
}

fn default_k_at() -> usize {
    200
}

fn default_num_queries() -> usize {
    1000
}

fn default_num_realizations() -> usize {
    10
}

/// Sequential block processing: one matrix of D = k * block_size
/// rows, MAP measured after each listed block prefix.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequentialSpec {
    pub k: usize,
    pub block_size: usize,
    /// Block prefixes to report; defaults to 1..=k.
    #[serde(default)]
    pub prefixes: Vec<usize>,
}

impl ExperimentSpec {
    pub fn from_file(path: &Path, overrides: &[String]) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, overrides)
    }

    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self, BenchError> {
        let mut doc: toml::Value = text.parse()?;
        for ov in overrides {
            apply_override(&mut doc, ov)?;
        }
        let spec: ExperimentSpec = doc.try_into()?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::InvalidSpec(m));
        if self.preprocess.is_empty() {
            return bad("empty preprocess list".into());
        }
        if self.projection.distributions.is_empty() || self.projection.densities.is_empty() {
            return bad("empty projection grid".into());
        }
        if self.scenarios.is_empty() {
            return bad("empty scenarios list".into());
        }
        if self.sequential.is_none() {
            if self.k.is_empty() {
                return bad("empty k list".into());
            }
            if self.sparsifiers.is_empty() {
                return bad("empty sparsifier list".into());
            }
            if self.k.contains(&0) {
                return bad("k must be >= 1".into());
            }
        }
        if let Some(seq) = &self.sequential {
            if seq.k == 0 || seq.block_size == 0 {
                return bad("sequential k and block_size must be >= 1".into());
            }
            if seq.prefixes.iter().any(|&i| i == 0 || i > seq.k) {
                return bad("sequential prefixes must lie in [1, k]".into());
            }
        }
        for name in &self.preprocess {
            parse_preprocess(name, self.original_r)?;
        }
        for name in &self.scenarios {
            parse_scenario(name)?;
        }
        for name in &self.projection.distributions {
            parse_distribution(name)?;
        }
        Ok(())
    }
}

/// Applies one `--path.to.key=value` override onto the parsed document.
fn apply_override(doc: &mut toml::Value, raw: &str) -> Result<(), BenchError> {
    let stripped = raw.strip_prefix("--").unwrap_or(raw);
    let (path, value) = stripped.split_once('=').ok_or_else(|| {
        BenchError::InvalidSpec(format!("override {raw:?} is not of the form --key=value"))
    })?;
    let parsed: toml::Value = format!("v = {value}")
        .parse::<toml::Value>()
        .ok()
        .and_then(|t| t.get("v").cloned())
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    let mut node = doc;
    let segments: Vec<&str> = path.split('.').collect();
    for seg in &segments[..segments.len() - 1] {
        node = node
            .as_table_mut()
            .ok_or_else(|| BenchError::InvalidSpec(format!("override path {path:?} invalid")))?
            .entry(seg.to_string())
            .or_insert(toml::Value::Table(Default::default()));
    }
    node.as_table_mut()
        .ok_or_else(|| BenchError::InvalidSpec(format!("override path {path:?} invalid")))?
        .insert(segments[segments.len() - 1].to_string(), parsed);
    Ok(())
}

pub fn parse_preprocess(name: &str, r: f64) -> Result<PreprocessSpec, BenchError> {
    match name {
        "none" => Ok(PreprocessSpec::None),
        "original" => Ok(PreprocessSpec::Original { r }),
        "mean_center" => Ok(PreprocessSpec::MeanCenter),
        "l2_normalize" => Ok(PreprocessSpec::L2Normalize),
        "center_normalize" => Ok(PreprocessSpec::CenterNormalize),
        other => Err(BenchError::InvalidSpec(format!(
            "unknown preprocess {other:?}"
        ))),
    }
}

pub fn parse_distribution(name: &str) -> Result<flyhash_core::Distribution, BenchError> {
    use flyhash_core::Distribution::*;
    match name {
        "binomial" => Ok(Binomial),
        "hypergeo_rows" => Ok(HypergeoRows),
        "hypergeo_cols" => Ok(HypergeoCols),
        other => Err(BenchError::InvalidSpec(format!(
            "unknown distribution {other:?}"
        ))),
    }
}

/// (ground-truth measure, embedding measure).
pub fn parse_scenario(name: &str) -> Result<(Measure, Measure), BenchError> {
    match name {
        "euc_euc" => Ok((Measure::Euclidean, Measure::Euclidean)),
        "ang_ang" => Ok((Measure::Angular, Measure::Angular)),
        other => Err(BenchError::InvalidSpec(format!(
            "unknown scenario {other:?}"
        ))),
    }
}
