//! End-to-end checks of the binary: output contracts and exit codes.

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ising-lb");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn binary")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_edge_graph(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("edge.el");
    std::fs::write(&path, "2\n0 1\n").unwrap();
    path
}

#[test]
fn exact_corr_single_edge_is_tanh_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_edge_graph(dir.path());
    let out = run(&["exact", "corr", "--graph", graph.to_str().unwrap(), "--lambda", "1"]);
    let v = stdout_json(&out);
    let corr = v["correlation"].as_f64().unwrap();
    assert!((corr - 1.0f64.tanh()).abs() < 1e-12, "got {corr}");
}

#[test]
fn exact_z_and_kl_on_disjoint_pair() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_edge_graph(dir.path());
    let empty = dir.path().join("empty.el");
    std::fs::write(&empty, "2\n").unwrap();

    let out = run(&["exact", "z", "--graph", graph.to_str().unwrap(), "--lambda", "0.5"]);
    let z = stdout_json(&out)["log_partition"].as_f64().unwrap();
    // 2 cosh(lambda) + 2 cosh(-lambda) over the four states
    let expected = (4.0 * 0.5f64.cosh()).ln();
    assert!((z - expected).abs() < 1e-12, "got {z}");

    let out = run(&[
        "exact", "kl",
        "--graph", graph.to_str().unwrap(),
        "--other", empty.to_str().unwrap(),
        "--lambda", "0.5",
    ]);
    let kl = stdout_json(&out)["kl"].as_f64().unwrap();
    // lambda * tanh(lambda) - ln cosh(lambda), the single-edge closed form
    let expected = 0.5f64 * 0.5f64.tanh() - 0.5f64.cosh().ln();
    assert!((kl - expected).abs() < 1e-12, "got {kl}");
}

#[test]
fn bound_report_json_shape() {
    let out = run(&[
        "bound", "path-restricted",
        "--p", "1000", "--eta", "3", "--lambda", "0.2", "--delta", "0.1",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["winning_term"], "hamming-term");
    assert_eq!(v["term_values"].as_array().unwrap().len(), 2);
    let n = v["n_threshold"].as_f64().unwrap();
    assert!((n - 141.6881118218511).abs() < 1e-9, "got {n}");
    assert_eq!(v["vacuous"], false);
}

#[test]
fn bound_csv_format_has_term_rows() {
    let out = run(&[
        "--format", "csv",
        "bound", "dregular",
        "--p", "12", "--d", "3", "--lambda", "0.5", "--delta", "0.3",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "term,value,log_value,overflow");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("n_threshold,"));
}

#[test]
fn construct_then_verify_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("ens");
    let out = run(&[
        "construct", "dregular",
        "--p", "12", "--d", "3", "--lambda", "0.5",
        "--out", out_dir.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["members"], 18);
    assert!(out_dir.join("manifest.json").is_file());
    assert!(out_dir.join("center.edgelist").is_file());
    let members = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("member_")
        })
        .count();
    assert_eq!(members, 18);

    let out = run(&["verify", "ensemble", "--dir", out_dir.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["clean"], true, "violations: {}", v["report"]["violations"]);
}

#[test]
fn verify_ld_connect_reports_certificate() {
    let dir = tempfile::tempdir().unwrap();
    // two vertex-disjoint paths of length 2 between 0 and 3
    let path = dir.path().join("diamond.el");
    std::fs::write(&path, "4\n0 1\n1 3\n0 2\n2 3\n").unwrap();
    let out = run(&[
        "verify", "ld-connect",
        "--graph", path.to_str().unwrap(),
        "--s", "0", "--t", "3", "--l", "2", "--d", "2",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["connected"], true);
    assert_eq!(v["found"], 2);
    assert_eq!(v["certificate"]["paths"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_emits_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let ens_dir = dir.path().join("ens");
    let out = run(&[
        "construct", "dregular",
        "--p", "8", "--d", "3", "--lambda", "0.5",
        "--out", ens_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "ensemble_dir": ens_dir.to_str().unwrap(),
            "sample_sizes": [4, 16],
            "trials": 20,
            "seed": 7,
            "decoder": "ml-exact",
            "error_metric": "avg",
        })
        .to_string(),
    )
    .unwrap();
    let csv_out = dir.path().join("rows.csv");
    let out = run(&[
        "--format", "csv",
        "simulate",
        "--config", cfg.to_str().unwrap(),
        "--out-csv", csv_out.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("n,trials,errors,p_hat"));
    assert_eq!(lines.len(), 3);
    assert_eq!(std::fs::read_to_string(&csv_out).unwrap(), text);
}

#[test]
fn er_sample_is_seed_deterministic() {
    let a = run(&["er", "sample", "--p", "30", "--c", "10", "--seed", "5"]);
    let b = run(&["er", "sample", "--p", "30", "--c", "10", "--seed", "5"]);
    let c = run(&["er", "sample", "--p", "30", "--c", "10", "--seed", "6"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn er_bound_reports_quantities() {
    let out = run(&[
        "er", "bound",
        "--p", "720", "--c", "230.4", "--lambda", "0.1", "--p-avg", "0.01",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["dominant_denominator_term"], "connectivity");
    assert!(v["lower_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn argument_errors_exit_2() {
    // clap-level: unknown flag
    let out = run(&["bound", "hamming1", "--nope", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // domain-level: missing input file
    let out = run(&["exact", "z", "--graph", "/nonexistent/g.el", "--lambda", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // domain-level: vertex index out of range
    let dir = tempfile::tempdir().unwrap();
    let graph = write_edge_graph(dir.path());
    let out = run(&[
        "exact", "corr",
        "--graph", graph.to_str().unwrap(),
        "--lambda", "1", "--s", "0", "--t", "9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn capacity_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("six.el");
    std::fs::write(&path, "6\n0 1\n2 3\n4 5\n").unwrap();
    let out = Command::new(BIN)
        .env("ISING_LB_MAX_P", "4")
        .args(["exact", "z", "--graph", path.to_str().unwrap(), "--lambda", "0.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
