//! End-to-end tests of the command-line interface: spec parsing with
//! overrides, report writing, report verification, and exit codes.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flyhash-bench"))
}

/// Writes a small dense CSV dataset (40 vectors, 6 dims) and a spec file.
fn write_fixture(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
    let data_path = dir.join("data.csv");
    let mut lines = String::new();
    let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
    for _ in 0..40 {
        let row: Vec<String> = (0..6)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
                format!("{:.6}", (state >> 11) as f64 / (1u64 << 53) as f64)
            })
            .collect();
        lines.push_str(&row.join(","));
        lines.push('\n');
    }
    std::fs::write(&data_path, lines).unwrap();

    let spec_path = dir.join("spec.toml");
    let spec = format!(
        r#"
master_seed = 11
preprocess = ["none"]
scenarios = ["euc_euc"]
k = [3]
sparsifiers = ["kwta_binary"]

[source]
format = "csv_dense"
path = "{}"
subset_size = 40

[projection]
distributions = ["binomial"]
densities = [0.2]

[eval]
k_at = 5
num_queries = 10
num_realizations = 2
"#,
        data_path.display()
    );
    std::fs::write(&spec_path, spec).unwrap();
    (data_path, spec_path)
}

#[test]
fn run_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (_, spec_path) = write_fixture(dir.path());
    let report = dir.path().join("report.csv");

    let out = bin()
        .args(["run", spec_path.to_str().unwrap(), "--out", report.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(report.exists());

    let out = bin().args(["verify", report.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("OK"));
}

#[test]
fn overrides_change_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let (_, spec_path) = write_fixture(dir.path());
    let report = dir.path().join("report.csv");

    let out = bin()
        .args([
            "run",
            spec_path.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
            "--eval.num_realizations=1",
            "--k=[2, 3]",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&report).unwrap();
    // 2 k-values x 1 realization + 2 aggregate rows + header
    assert_eq!(body.lines().count(), 5);
}

#[test]
fn missing_spec_exits_one() {
    let out = bin().args(["run", "/nonexistent/spec.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn per_run_errors_exit_two_but_write_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let (data_path, spec_path) = write_fixture(dir.path());
    // append an all-zero vector so l2 normalization fails
    let mut body = std::fs::read_to_string(&data_path).unwrap();
    body.push_str("0,0,0,0,0,0\n");
    std::fs::write(&data_path, body).unwrap();
    let report = dir.path().join("report.csv");

    let out = bin()
        .args([
            "run",
            spec_path.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
            "--source.subset_size=41",
            "--preprocess=[\"l2_normalize\"]",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let body = std::fs::read_to_string(&report).unwrap();
    assert!(body.contains("zero norm"));
}

#[test]
fn verify_rejects_tampered_map() {
    let dir = tempfile::tempdir().unwrap();
    let (_, spec_path) = write_fixture(dir.path());
    let report = dir.path().join("report.csv");
    let out = bin()
        .args(["run", spec_path.to_str().unwrap(), "--out", report.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    // bump one map value outside [0,1]
    let body = std::fs::read_to_string(&report).unwrap();
    let mut lines: Vec<String> = body.lines().map(String::from).collect();
    let target = lines
        .iter()
        .position(|l| !l.starts_with("dataset"))
        .unwrap();
    let fields: Vec<&str> = lines[target].split(',').collect();
    let mut fields: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
    fields[12] = "1.5".to_string();
    lines[target] = fields.join(",");
    std::fs::write(&report, lines.join("\n") + "\n").unwrap();

    let out = bin().args(["verify", report.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
}

#[test]
fn formats_prints_documentation() {
    let out = bin().arg("formats").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for needle in ["fvecs", "IDX", "GloVe", "SPBM", "wall_ms"] {
        assert!(text.contains(needle), "missing {needle:?}");
    }
}
