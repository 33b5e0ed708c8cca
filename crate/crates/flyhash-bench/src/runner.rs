//! Executes expanded run lists and writes/validates CSV reports.
//!
//! CSV schema (exact column order): dataset, preprocess, distribution,
//! density, sparsifier, k, D, k_prime, k_prime_saturated, scenario,
//! realization, seed, map, bits_kwta, bits_block, wall_ms, error.
//! Per-realization rows are grouped per configuration and followed by an
//! aggregate row with realization = "mean". wall_ms is the only
//! non-deterministic column; report comparisons must exclude it.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use flyhash_core::evaluation::{ground_truth_topk, map_from_truth, sample_query_ids};
use flyhash_core::projection::{project_dataset, ProjectionSpec};
use flyhash_core::sparsifier::{
    block_winners, kwta_binary, matching_blocks, storage_bits_block, storage_bits_kwta,
    truncate_blocks,
};
use flyhash_core::{pairwise_mean, CoreError, DenseDataset, Embedding, SparsifierSpec};
use rayon::prelude::*;

use crate::config::ExperimentSpec;
use crate::error::BenchError;
use crate::grid::{expand_grid, RunConfig, RunVariant};

pub const CSV_COLUMNS: [&str; 17] = [
    "dataset",
    "preprocess",
    "distribution",
    "density",
    "sparsifier",
    "k",
    "D",
    "k_prime",
    "k_prime_saturated",
    "scenario",
    "realization",
    "seed",
    "map",
    "bits_kwta",
    "bits_block",
    "wall_ms",
    "error",
];

/// Environment variable naming the worker-pool size.
pub const WORKERS_ENV: &str = "FLYHASH_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub dataset: String,
    pub preprocess: String,
    pub distribution: String,
    pub density: f64,
    pub sparsifier: String,
    pub k: usize,
    pub output_dim: usize,
    pub k_prime: Option<usize>,
    pub k_prime_saturated: Option<bool>,
    pub scenario: String,
    pub realization: String,
    pub seed: Option<u64>,
    pub map: Option<f64>,
    pub bits_kwta: f64,
    pub bits_block: f64,
    pub wall_ms: Option<u128>,
    pub error: String,
}

impl Row {
    fn record(&self) -> Vec<String> {
        let opt = |s: Option<String>| s.unwrap_or_default();
        vec![
            self.dataset.clone(),
            self.preprocess.clone(),
            self.distribution.clone(),
            self.density.to_string(),
            self.sparsifier.clone(),
            self.k.to_string(),
            self.output_dim.to_string(),
            opt(self.k_prime.map(|v| v.to_string())),
            opt(self.k_prime_saturated.map(|v| v.to_string())),
            self.scenario.clone(),
            self.realization.clone(),
            opt(self.seed.map(|v| v.to_string())),
            opt(self.map.map(|v| v.to_string())),
            self.bits_kwta.to_string(),
            self.bits_block.to_string(),
            opt(self.wall_ms.map(|v| v.to_string())),
            self.error.clone(),
        ]
    }

    /// Everything except realization, seed, map, wall time, and error:
    /// rows sharing this key belong to the same configuration.
    fn group_key(&self) -> String {
        format!(
            "{}|{}|{}|{}|{}|{}|{}|{:?}|{:?}|{}",
            self.dataset,
            self.preprocess,
            self.distribution,
            self.density,
            self.sparsifier,
            self.k,
            self.output_dim,
            self.k_prime,
            self.k_prime_saturated,
            self.scenario
        )
    }
}

/// Resolves a sparsifier name at a given (k, D), computing the
/// matching-bits block count where requested.
fn resolve_sparsifier(
    name: &str,
    k: usize,
    output_dim: usize,
) -> Result<(SparsifierSpec, Option<usize>, Option<bool>), BenchError> {
    match name {
        "kwta_real" => Ok((SparsifierSpec::KwtaReal { k }, None, None)),
        "kwta_binary" => Ok((SparsifierSpec::KwtaBinary { k }, None, None)),
        "kwta_real_l2" => Ok((SparsifierSpec::KwtaRealL2 { k }, None, None)),
        "block_binary" => Ok((SparsifierSpec::BlockBinary { k }, None, None)),
        "block_binary_matching_bits" => {
            let mb = matching_blocks(k, output_dim).map_err(CoreError::from)?;
            Ok((
                SparsifierSpec::BlockBinary { k: mb.k_prime },
                Some(mb.k_prime),
                Some(mb.saturated),
            ))
        }
        other => Err(BenchError::InvalidSpec(format!(
            "unknown sparsifier {other:?}"
        ))),
    }
}

fn base_row(rc: &RunConfig) -> Row {
    let k = rc.variant.k();
    let output_dim = rc.variant.output_dim();
    Row {
        dataset: rc.dataset_tag.clone(),
        preprocess: rc.preprocess_name.clone(),
        distribution: rc.distribution.name().to_string(),
        density: rc.density,
        sparsifier: String::new(),
        k,
        output_dim,
        k_prime: None,
        k_prime_saturated: None,
        scenario: rc.scenario_name.clone(),
        realization: rc.realization.to_string(),
        seed: Some(rc.seed),
        map: None,
        bits_kwta: storage_bits_kwta(k, output_dim).unwrap_or(f64::NAN),
        bits_block: storage_bits_block(k, output_dim).unwrap_or(f64::NAN),
        wall_ms: None,
        error: String::new(),
    }
}

/// Executes one atomic run. Failures are recorded in the error column;
/// the grid keeps going.
pub fn execute_run(x: &DenseDataset, rc: &RunConfig) -> Vec<Row> {
    let start = Instant::now();
    let mut rows = match try_execute(x, rc) {
        Ok(rows) => rows,
        Err(e) => {
            let mut row = base_row(rc);
            row.error = e.to_string();
            vec![row]
        }
    };
    let elapsed = start.elapsed().as_millis();
    for r in &mut rows {
        r.wall_ms = Some(elapsed);
    }
    rows
}

fn try_execute(x: &DenseDataset, rc: &RunConfig) -> Result<Vec<Row>, BenchError> {
    let x_pre = rc.preprocess.apply(x)?;
    let spec = ProjectionSpec {
        output_dim: rc.variant.output_dim(),
        density: rc.density,
        distribution: rc.distribution,
        seed: rc.seed,
    };
    let matrix = spec.sample(x_pre.dims())?;
    let activations = project_dataset(&matrix, &x_pre)?;
    let k_at = rc.eval.k_at;
    let query_ids = sample_query_ids(x_pre.count(), rc.eval.num_queries, rc.seed, rc.realization);
    let truth = ground_truth_topk(&x_pre, rc.gt_measure, k_at, &query_ids)?;

    match &rc.variant {
        RunVariant::Grid {
            sparsifier,
            k,
            output_dim,
        } => {
            let (spec, k_prime, saturated) = resolve_sparsifier(sparsifier, *k, *output_dim)?;
            let embeddings: Result<Vec<Embedding>, CoreError> =
                activations.iter().map(|y| spec.apply(y)).collect();
            let map = map_from_truth(&truth, &embeddings?, rc.emb_measure, k_at)?;
            let mut row = base_row(rc);
            row.sparsifier = sparsifier.clone();
            row.k_prime = k_prime;
            row.k_prime_saturated = saturated;
            if let Some(kp) = k_prime {
                row.bits_block = storage_bits_block(kp, *output_dim).map_err(CoreError::from)?;
            }
            row.map = Some(map);
            Ok(vec![row])
        }
        RunVariant::Sequential {
            k,
            block_size: _,
            prefixes,
        } => {
            let blocks: Result<Vec<Embedding>, CoreError> =
                activations.iter().map(|y| y.dense_values().map(|v| block_winners(v, *k)).unwrap()).collect();
            let blocks = blocks?;
            let kwtas: Result<Vec<Embedding>, CoreError> = activations
                .iter()
                .map(|y| y.dense_values().map(|v| kwta_binary(v, *k)).unwrap())
                .collect();
            let kwtas = kwtas?;
            let partition =
                flyhash_core::sparsifier::block_partition(rc.variant.output_dim(), *k)
                    .map_err(CoreError::from)?;
            let mut rows = Vec::new();
            for &prefix in prefixes {
                for (tag, embeddings) in [("block_seq", &blocks), ("kwta_seq", &kwtas)] {
                    let mut row = base_row(rc);
                    row.sparsifier = format!("{tag}[i={prefix}]");
                    let truncated: Result<Vec<Embedding>, CoreError> = embeddings
                        .iter()
                        .map(|e| truncate_blocks(e, Some(&partition), prefix))
                        .collect();
                    match truncated
                        .and_then(|t| map_from_truth(&truth, &t, rc.emb_measure, k_at))
                    {
                        Ok(map) => row.map = Some(map),
                        Err(e) => row.error = e.to_string(),
                    }
                    rows.push(row);
                }
            }
            Ok(rows)
        }
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub total_rows: usize,
    pub errored_rows: usize,
}

/// Runs the whole grid and writes the CSV report. Execution may be
/// parallel; rows are merged in deterministic grid order.
pub fn run_experiment(spec: &ExperimentSpec, out_path: &Path) -> Result<RunSummary, BenchError> {
    let dataset = spec.source.load()?;
    let tag = spec
        .source
        .path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    let runs = expand_grid(spec, &tag)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(
            std::env::var(WORKERS_ENV)
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(0),
        )
        .build()
        .map_err(|e| BenchError::InvalidSpec(format!("worker pool: {e}")))?;
    let row_lists: Vec<Vec<Row>> =
        pool.install(|| runs.par_iter().map(|rc| execute_run(&dataset, rc)).collect());

    let rows = group_with_aggregates(row_lists.into_iter().flatten().collect());
    let errored = rows.iter().filter(|r| !r.error.is_empty()).count();

    let mut writer = csv::Writer::from_path(out_path)?;
    writer.write_record(CSV_COLUMNS)?;
    for row in &rows {
        writer.write_record(row.record())?;
    }
    writer.flush()?;
    Ok(RunSummary {
        total_rows: rows.len(),
        errored_rows: errored,
    })
}

/// Groups rows by configuration (first-seen order), sorts each group by
/// realization, and appends one aggregate row per group with the mean of
/// the error-free MAP values.
fn group_with_aggregates(rows: Vec<Row>) -> Vec<Row> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<Row>> = BTreeMap::new();
    for row in rows {
        let key = row.group_key();
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(row);
    }
    let mut out = Vec::new();
    for key in order {
        let mut group = groups.remove(&key).unwrap();
        group.sort_by_key(|r| r.realization.parse::<usize>().unwrap_or(usize::MAX));
        let maps: Vec<f64> = group.iter().filter_map(|r| r.map).collect();
        let mut mean = group[0].clone();
        mean.realization = "mean".to_string();
        mean.seed = None;
        mean.wall_ms = None;
        mean.map = if maps.is_empty() {
            None
        } else {
            Some(pairwise_mean(&maps))
        };
        mean.error = String::new();
        out.extend(group);
        out.push(mean);
    }
    out
}

#[derive(Debug, Default)]
pub struct VerifySummary {
    pub data_rows: usize,
    pub aggregate_rows: usize,
}

/// Validates a report: exact header, MAP within [0,1], realization
/// indices monotone nondecreasing within each configuration, and seed
/// consistency (equal configuration + realization implies equal seed).
pub fn verify_report(path: &Path) -> Result<VerifySummary, BenchError> {
    let mut reader = csv::ReaderBuilder::new().flexible(false).from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_COLUMNS {
        return Err(BenchError::SchemaViolation(format!(
            "header mismatch: {:?}",
            header
        )));
    }
    let idx = |name: &str| CSV_COLUMNS.iter().position(|c| *c == name).unwrap();
    let (i_real, i_seed, i_map, i_err) =
        (idx("realization"), idx("seed"), idx("map"), idx("error"));
    let group_cols: Vec<usize> = [
        "dataset",
        "preprocess",
        "distribution",
        "density",
        "sparsifier",
        "k",
        "D",
        "k_prime",
        "k_prime_saturated",
        "scenario",
    ]
    .iter()
    .map(|c| idx(c))
    .collect();

    let mut summary = VerifySummary::default();
    let mut last_realization: BTreeMap<String, usize> = BTreeMap::new();
    let mut seen_seeds: BTreeMap<(String, usize), u64> = BTreeMap::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BenchError::SchemaViolation(e.to_string()))?;
        let key: String = group_cols
            .iter()
            .map(|&c| record.get(c).unwrap_or(""))
            .collect::<Vec<_>>()
            .join("|");
        let map_field = record.get(i_map).unwrap_or("");
        let err_field = record.get(i_err).unwrap_or("");
        if !map_field.is_empty() {
            let map: f64 = map_field.parse().map_err(|_| {
                BenchError::SchemaViolation(format!("row {line}: unparsable map {map_field:?}"))
            })?;
            if !(0.0..=1.0).contains(&map) {
                return Err(BenchError::SchemaViolation(format!(
                    "row {line}: map {map} outside [0,1]"
                )));
            }
        } else if err_field.is_empty() {
            return Err(BenchError::SchemaViolation(format!(
                "row {line}: empty map with empty error"
            )));
        }
        let realization = record.get(i_real).unwrap_or("");
        if realization == "mean" {
            summary.aggregate_rows += 1;
            continue;
        }
        let r: usize = realization.parse().map_err(|_| {
            BenchError::SchemaViolation(format!("row {line}: bad realization {realization:?}"))
        })?;
        if let Some(&prev) = last_realization.get(&key) {
            if r < prev {
                return Err(BenchError::SchemaViolation(format!(
                    "row {line}: realization {r} after {prev} in the same configuration"
                )));
            }
        }
        last_realization.insert(key.clone(), r);
        if let Some(seed_field) = record.get(i_seed).filter(|s| !s.is_empty()) {
            let seed: u64 = seed_field.parse().map_err(|_| {
                BenchError::SchemaViolation(format!("row {line}: bad seed {seed_field:?}"))
            })?;
            if let Some(&prev) = seen_seeds.get(&(key.clone(), r)) {
                if prev != seed {
                    return Err(BenchError::SchemaViolation(format!(
                        "row {line}: seed {seed} disagrees with {prev} for the same cell"
                    )));
                }
            }
            seen_seeds.insert((key, r), seed);
        }
        summary.data_rows += 1;
    }
    Ok(summary)
}

/// Reads a report body for byte-comparison, masking the wall_ms column
/// (the only non-deterministic one).
pub fn canonical_body(path: &Path) -> Result<String, BenchError> {
    let mut reader = csv::ReaderBuilder::new().from_path(path)?;
    let wall = CSV_COLUMNS.iter().position(|c| *c == "wall_ms").unwrap();
    let mut out = String::new();
    for record in reader.records() {
        let record = record?;
        let fields: Vec<&str> = record
            .iter()
            .enumerate()
            .map(|(i, f)| if i == wall { "-" } else { f })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}
