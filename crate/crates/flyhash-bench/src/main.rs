//! Command-line experiment runner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use flyhash_bench::config::ExperimentSpec;
use flyhash_bench::runner::{run_experiment, verify_report};

#[derive(Parser)]
#[command(
    name = "flyhash-bench",
    about = "Sparse randomized embedding experiments with MAP@K evaluation",
    after_help = "Worker-pool size is read from the FLYHASH_WORKERS environment variable."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid described by a TOML spec file.
    Run {
        /// Path to the spec file.
        spec: PathBuf,
        /// Output CSV path.
        #[arg(long, default_value = "report.csv")]
        out: PathBuf,
        /// Spec overrides of the form --key=value (dotted paths allowed),
        /// e.g. --eval.num_queries=200.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Validate a CSV report against the schema.
    Verify {
        /// Path to the CSV report.
        csv: PathBuf,
    },
    /// Print documentation for the supported file formats.
    Formats,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { spec, out, overrides } => {
            let spec = match ExperimentSpec::from_file(&spec, &overrides) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("spec error: {e}");
                    return ExitCode::from(1);
                }
            };
            match run_experiment(&spec, &out) {
                Ok(summary) => {
                    println!(
                        "wrote {} rows ({} errored) to {}",
                        summary.total_rows,
                        summary.errored_rows,
                        out.display()
                    );
                    if summary.errored_rows > 0 {
                        ExitCode::from(2)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(e) => {
                    eprintln!("run failed: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Command::Verify { csv } => match verify_report(&csv) {
            Ok(summary) => {
                println!(
                    "OK: {} data rows, {} aggregate rows",
                    summary.data_rows, summary.aggregate_rows
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("verification failed: {e}");
                ExitCode::from(1)
            }
        },
        Command::Formats => {
            println!("{}", FORMATS_DOC.trim_start());
            ExitCode::SUCCESS
        }
    }
}

const FORMATS_DOC: &str = r#"
Input dataset formats
=====================

fvecs (format = "fvecs")
  Per vector: a little-endian 32-bit integer d, then d little-endian
  32-bit floats. All records must share d.

IDX images (format = "idx_images")
  Big-endian magic 0x00000803, then three big-endian u32 values
  (count, rows, cols) and count*rows*cols raw u8 pixels. Each image is
  flattened row-major into one vector of dimension rows*cols; pixel
  values 0-255 are used as-is.

GloVe text (format = "glove_text")
  One line per vector: a token followed by d space-separated decimal
  reals. Tokens are discarded; ids are line numbers.

Dense CSV (format = "csv_dense")
  Header-free comma-separated rows, one vector per row.

Projection-matrix snapshot
==========================
  Magic "SPBM", version u16 LE, D u64 LE, d u64 LE, nnz u64 LE, then
  D+1 row offsets as u64 LE and nnz column indices as u32 LE.

Report CSV
==========
  Columns: dataset, preprocess, distribution, density, sparsifier, k, D,
  k_prime, k_prime_saturated, scenario, realization, seed, map,
  bits_kwta, bits_block, wall_ms, error.
  One row per (configuration, realization), then one aggregate row per
  configuration with realization = "mean". wall_ms is wall-clock and
  excluded from determinism comparisons.
"#;
