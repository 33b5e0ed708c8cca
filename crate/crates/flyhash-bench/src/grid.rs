//! Grid expansion: an [`ExperimentSpec`] becomes a deterministic list of
//! atomic runs, one per (configuration, realization), each carrying a
//! seed derived by a stable hash so adding grid dimensions never shifts
//! the seeds of existing cells.
//!
//! Expansion order (outer to inner): preprocess, distribution, density,
//! k, sparsifier, scenario, realization.

use flyhash_core::similarity::Measure;
use flyhash_core::{Distribution, PreprocessSpec};

use crate::config::{
    parse_distribution, parse_preprocess, parse_scenario, EvalGrid, ExperimentSpec,
};
use crate::error::BenchError;

#[derive(Debug, Clone, PartialEq)]
pub enum RunVariant {
    /// One sparsifier at one k.
    Grid {
        sparsifier: String,
        k: usize,
        output_dim: usize,
    },
    /// Sequential block processing: block code and binary kWTA embeddings
    /// evaluated after each listed block prefix.
    Sequential {
        k: usize,
        block_size: usize,
        prefixes: Vec<usize>,
    },
}

impl RunVariant {
    pub fn k(&self) -> usize {
        match self {
            RunVariant::Grid { k, .. } | RunVariant::Sequential { k, .. } => *k,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            RunVariant::Grid { output_dim, .. } => *output_dim,
            RunVariant::Sequential { k, block_size, .. } => k * block_size,
        }
    }
}

/// One atomic unit of work: a fully resolved configuration plus a
/// realization index and its derived seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset_tag: String,
    pub preprocess_name: String,
    pub preprocess: PreprocessSpec,
    pub distribution: Distribution,
    pub density: f64,
    pub variant: RunVariant,
    pub scenario_name: String,
    pub gt_measure: Measure,
    pub emb_measure: Measure,
    pub eval: EvalGrid,
    pub realization: usize,
    pub seed: u64,
}

impl RunConfig {
    /// The part of the configuration that determines the random draws.
    /// Scenario and sparsifier are deliberately excluded: they change
    /// only what is measured, so matched cells (e.g. Euc/Euc vs Ang/Ang,
    /// or kWTA vs block codes at the same k and D) share matrices and
    /// query samples.
    pub fn seed_fingerprint(&self) -> String {
        format!(
            "dataset={};preprocess={};distribution={};density={};k={};D={}",
            self.dataset_tag,
            self.preprocess_name,
            self.distribution.name(),
            self.density,
            self.variant.k(),
            self.variant.output_dim(),
        )
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master_seed: u64, fingerprint: &str, realization: usize) -> u64 {
    mix(fnv1a64(fingerprint.as_bytes())
        ^ mix(master_seed)
        ^ mix(realization as u64 ^ 0xA5A5_A5A5_5A5A_5A5A))
}

/// Expands the spec into atomic runs in deterministic order.
pub fn expand_grid(
    spec: &ExperimentSpec,
    dataset_tag: &str,
) -> Result<Vec<RunConfig>, BenchError> {
    spec.validate()?;
    let mut runs = Vec::new();
    for pre_name in &spec.preprocess {
        let preprocess = parse_preprocess(pre_name, spec.original_r)?;
        for dist_name in &spec.projection.distributions {
            let distribution = parse_distribution(dist_name)?;
            for &density in &spec.projection.densities {
                let variants: Vec<RunVariant> = match &spec.sequential {
                    Some(seq) => {
                        let prefixes = if seq.prefixes.is_empty() {
                            (1..=seq.k).collect()
                        } else {
                            seq.prefixes.clone()
                        };
                        vec![RunVariant::Sequential {
                            k: seq.k,
                            block_size: seq.block_size,
                            prefixes,
                        }]
                    }
                    None => spec
                        .k
                        .iter()
                        .flat_map(|&k| {
                            spec.sparsifiers.iter().map(move |s| RunVariant::Grid {
                                sparsifier: s.clone(),
                                k,
                                output_dim: spec.projection.d_rule.output_dim(k),
                            })
                        })
                        .collect(),
                };
                for variant in variants {
                    for scenario_name in &spec.scenarios {
                        let (gt_measure, emb_measure) = parse_scenario(scenario_name)?;
                        for realization in 0..spec.eval.num_realizations {
                            let mut rc = RunConfig {
                                dataset_tag: dataset_tag.to_string(),
                                preprocess_name: pre_name.clone(),
                                preprocess,
                                distribution,
                                density,
                                variant: variant.clone(),
                                scenario_name: scenario_name.clone(),
                                gt_measure,
                                emb_measure,
                                eval: spec.eval,
                                realization,
                                seed: 0,
                            };
                            rc.seed =
                                derive_seed(spec.master_seed, &rc.seed_fingerprint(), realization);
                            runs.push(rc);
                        }
                    }
                }
            }
        }
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentSpec;

    const BASE: &str = r#"
master_seed = 7
preprocess = ["none", "original"]
scenarios = ["euc_euc"]
k = [4, 8, 16]
sparsifiers = ["kwta_binary"]

[source]
format = "csv_dense"
path = "data.csv"

[projection]
distributions = ["binomial"]
densities = [0.1]

[eval]
k_at = 10
num_queries = 50
num_realizations = 1
"#;

    #[test]
    fn cartesian_product_size() {
        let spec = ExperimentSpec::from_toml(BASE, &[]).unwrap();
        // 2 preprocess x 3 k -> 6 runs
        assert_eq!(expand_grid(&spec, "t").unwrap().len(), 6);
    }

    #[test]
    fn expansion_is_deterministic() {
        let spec = ExperimentSpec::from_toml(BASE, &[]).unwrap();
        assert_eq!(
            expand_grid(&spec, "t").unwrap(),
            expand_grid(&spec, "t").unwrap()
        );
    }

    #[test]
    fn adding_a_dimension_keeps_existing_seeds() {
        let spec = ExperimentSpec::from_toml(BASE, &[]).unwrap();
        let wider =
            ExperimentSpec::from_toml(BASE, &["--preprocess=[\"none\"]".into()]).unwrap();
        let full = expand_grid(&spec, "t").unwrap();
        let narrow = expand_grid(&wider, "t").unwrap();
        for run in &narrow {
            let matching = full
                .iter()
                .find(|r| {
                    r.preprocess_name == run.preprocess_name
                        && r.variant == run.variant
                        && r.realization == run.realization
                })
                .unwrap();
            assert_eq!(matching.seed, run.seed);
        }
    }

    #[test]
    fn scenarios_share_seeds() {
        let spec =
            ExperimentSpec::from_toml(BASE, &["--scenarios=[\"euc_euc\", \"ang_ang\"]".into()])
                .unwrap();
        let runs = expand_grid(&spec, "t").unwrap();
        for r in &runs {
            let twin = runs
                .iter()
                .find(|o| {
                    o.scenario_name != r.scenario_name
                        && o.preprocess_name == r.preprocess_name
                        && o.variant == r.variant
                        && o.realization == r.realization
                })
                .unwrap();
            assert_eq!(twin.seed, r.seed);
        }
    }

    #[test]
    fn realizations_get_distinct_seeds() {
        let spec =
            ExperimentSpec::from_toml(BASE, &["--eval.num_realizations=5".into()]).unwrap();
        let runs = expand_grid(&spec, "t").unwrap();
        let mut seeds: Vec<u64> = runs.iter().map(|r| r.seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), runs.len());
    }
}
