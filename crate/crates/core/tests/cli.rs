use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use seqsub::distribution::JointDistribution;

fn seqsub(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqsub")).args(args).output().unwrap()
}

fn ok(args: &[&str]) {
    let out = seqsub(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(args: &[&str]) -> i32 {
    seqsub(args).status.code().unwrap()
}

fn path(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn generate(dir: &Path, extra: &[&str]) -> String {
    let mut args = vec!["generate", "--out"];
    let out = path(dir);
    args.push(&out);
    args.extend_from_slice(extra);
    ok(&args);
    path(&dir.join("dataset.csv"))
}

#[test]
fn generate_writes_dataset_truth_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    generate(tmp.path(), &["--scenario", "madelon_like", "--p", "2000", "--r", "10", "--n", "50"]);
    let truth = fs::read_to_string(tmp.path().join("dataset.csv.truth")).unwrap();
    assert_eq!(truth.lines().count(), 10);
    let csv = fs::read_to_string(tmp.path().join("dataset.csv")).unwrap();
    assert_eq!(csv.lines().count(), 51);
    assert!(!csv.contains('\r'));
    let config: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(config["generator"]["p"], 2000);
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = path(tmp.path());
    assert_eq!(code(&["generate", "--scenario", "clique", "--p", "3", "--r", "4", "--n", "10", "--out", &out]), 2);
    assert_eq!(code(&["generate", "--scenario", "spiral", "--p", "3", "--r", "1", "--n", "10", "--out", &out]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["converge", "--scenarios", "", "--p", "100", "--q", "10", "--r", "2", "--out", &out]), 2);
    assert_eq!(code(&["converge", "--scenarios", "clique", "--p", "100", "--q", "10", "--r", "11", "--out", &out]), 2);
    assert_eq!(code(&["run", "--q", "3", "--out", &out]), 2);
}

#[test]
fn missing_files_exit_with_four() {
    let tmp = tempfile::tempdir().unwrap();
    let out = path(tmp.path());
    assert_eq!(code(&["run", "--data", "/nonexistent/data.csv", "--q", "3", "--out", &out]), 4);
    assert_eq!(code(&["oracle", "--distribution", "/nonexistent/table.txt", "--out", &out]), 4);
}

#[test]
fn run_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(&tmp.path().join("gen"), &["--scenario", "marginal", "--p", "12", "--r", "3", "--n", "3000", "--seed", "1"]);
    let out = tmp.path().join("run");
    ok(&["run", "--data", &data, "--q", "6", "-t", "25", "--alpha", "0.5", "--probes", "4", "--out", &path(&out)]);
    for name in ["history.csv", "importances.csv", "f1_curve.csv", "summary.json", "config.json"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert!(history.starts_with("iteration,subspace_size,retained,accepted,added,found,f1\n"));
    assert_eq!(history.lines().count(), 26);
    assert!(history.lines().skip(1).all(|l| l.split(',').nth(1) == Some("6")));
    let importances = fs::read_to_string(out.join("importances.csv")).unwrap();
    assert_eq!(importances.lines().count(), 13);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert!(summary["score"]["f1"].as_f64().unwrap() > 0.0);
    assert!(summary.get("runtime_seconds").is_none());
}

#[test]
fn run_with_zero_iterations_writes_header_only() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(&tmp.path().join("gen"), &["--scenario", "clique", "--p", "8", "--r", "2", "--n", "50"]);
    let out = tmp.path().join("run");
    ok(&["run", "--data", &data, "--q", "4", "-t", "0", "--out", &path(&out)]);
    assert_eq!(fs::read_to_string(out.join("history.csv")).unwrap(), "iteration,subspace_size,retained,accepted,added,found,f1\n");
}

#[test]
fn run_with_every_feature_in_the_subspace() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(&tmp.path().join("gen"), &["--scenario", "marginal", "--p", "6", "--r", "2", "--n", "300"]);
    let out = tmp.path().join("run");
    ok(&["run", "--data", &data, "--q", "6", "--alpha", "0", "-t", "5", "--out", &path(&out)]);
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert!(history.lines().skip(1).all(|l| l.split(',').nth(2) == Some("0")));
}

#[test]
fn run_on_distribution_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("xor.txt");
    let xor = JointDistribution::from_fn(&[2, 2, 2], 2, |x, y| if (x[0] ^ x[1]) == y { 0.125 } else { 0.0 }).unwrap();
    fs::write(&table, xor.to_text()).unwrap();
    let out = tmp.path().join("run");
    ok(&["run", "--distribution", &path(&table), "--q", "3", "--k", "1", "-t", "50", "--out", &path(&out)]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["found"], serde_json::json!([0, 1]));
    assert!(!out.join("f1_curve.csv").exists());
}

#[test]
fn config_file_and_flag_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("gen.toml");
    fs::write(&config, "scenario = \"chaining\"\np = 9\nr = 3\nn = 20\nseed = 4\n").unwrap();
    let out = tmp.path().join("gen");
    ok(&["generate", "--config", &path(&config), "--p", "7", "--out", &path(&out)]);
    let echoed: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(echoed["generator"]["p"], 7);
    assert_eq!(echoed["generator"]["seed"], 4);

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "scenario = \"chaining\"\nwidth = 3\n").unwrap();
    assert_eq!(code(&["generate", "--config", &path(&bad), "--out", &path(&out)]), 2);
}

#[test]
fn converge_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("conv");
    ok(&["converge", "--preset", "chaining", "--horizon", "5", "--out", &path(&out)]);
    let table = fs::read_to_string(out.join("table.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "scenario,p,q,r,rs,srs,rs_display,srs_display");
    assert!(rows[1].ends_with(",100,100"));
    assert!(rows[2].ends_with(",10100,200"));
    assert!(rows[3].ends_with(",>1e6,301"));
    assert!(rows[4].ends_with(",>1e10,506"));
    assert!(rows[5].ends_with(",>1e9,3028"));
    let curves = fs::read_to_string(out.join("curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 1 + 5 * 2 * 6);
}

#[test]
fn converge_simulation_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("conv");
    ok(&[
        "converge", "--scenarios", "chaining", "--p", "200", "--q", "20", "--r", "3", "--simulate", "1000", "--horizon", "0",
        "--format", "json", "--out", &path(&out),
    ]);
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("expected_times.json")).unwrap()).unwrap();
    for row in rows.as_array().unwrap() {
        let exact = row["expected_time"].as_f64().unwrap();
        let mean = row["sim_mean"].as_f64().unwrap();
        let se = row["sim_std_error"].as_f64().unwrap();
        assert!((mean - exact).abs() < 3.0 * se, "{row}");
    }
}

#[test]
fn oracle_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let table = tmp.path().join("xor.txt");
    let xor = JointDistribution::from_fn(&[2, 2, 2], 2, |x, y| if (x[0] ^ x[1]) == y { 0.125 } else { 0.0 }).unwrap();
    fs::write(&table, xor.to_text()).unwrap();
    let out = tmp.path().join("oracle");
    ok(&["oracle", "--distribution", &path(&table), "--q", "2", "--out", &path(&out)]);
    let report = fs::read_to_string(out.join("relevance.csv")).unwrap();
    let rows: Vec<Vec<&str>> = report.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][2], "strongly_relevant");
    assert_eq!(rows[0][3], "1");
    assert_eq!(rows[2][2], "irrelevant");
    assert_eq!(rows[2][5], "0");
    let importance: f64 = rows[0][5].parse().unwrap();
    // Three inputs, q = 2: (1/3) * (1/2) * 1 bit from the single witness.
    assert!((importance - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn oracle_capacity_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(&tmp.path().join("gen"), &["--scenario", "marginal", "--p", "13", "--r", "2", "--n", "20"]);
    let out = seqsub(&["oracle", "--data", &data, "--out", &path(&tmp.path().join("o"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit of 12"));
}
