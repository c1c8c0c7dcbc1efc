use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const WORKED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/worked_example.json");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relu-regions")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_one_neuron(dir: &TempDir) -> PathBuf {
    let p = path(dir, "one.json");
    std::fs::write(
        &p,
        r#"{"input_dim": 2, "hidden_layers": [{"weights": [[1, -1]], "bias": [0.25]}],
            "output": {"weights": [[2]], "bias": [0]}}"#,
    )
    .unwrap();
    p
}

#[test]
fn init_random_skip_specs() {
    let dir = TempDir::new().unwrap();
    let net = path(&dir, "net.json");
    let o = run(&["init-random", "--layers", "3", "--width", "4", "--skips", "1-3", "--out", s(&net)]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("config: "));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&net).unwrap()).unwrap();
    assert_eq!(doc["skips"].as_array().unwrap().len(), 1);

    let o = run(&["init-random", "--layers", "2", "--width", "3", "--skips", "", "--out", s(&net)]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&net).unwrap()).unwrap();
    assert!(doc["skips"].as_array().is_none_or(Vec::is_empty));

    let o = run(&["init-random", "--layers", "3", "--width", "4", "--skips", "2-3", "--out", s(&net)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn init_random_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for p in [&a, &b] {
        assert!(run(&["init-random", "--layers", "2", "--width", "5", "--seed", "9", "--out", s(p)]).status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn enumerate_summary_and_exports() {
    let dir = TempDir::new().unwrap();
    let (json, csv) = (path(&dir, "r.json"), path(&dir, "r.csv"));
    let o = run(&["enumerate", WORKED, "--out", s(&json), "--csv", s(&csv)]);
    assert!(o.status.success());
    let summary = stdout(&o).lines().last().unwrap().to_string();
    assert!(summary.starts_with("8 regions, "), "{summary}");
    assert!(summary.ends_with(" seconds"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(doc["regions"].as_array().unwrap().len(), 8);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 9);

    let one = write_one_neuron(&dir);
    assert!(stdout(&run(&["enumerate", s(&one)])).contains("2 regions"));
}

#[test]
fn enumerate_guard_and_bad_box() {
    let dir = TempDir::new().unwrap();
    let big = path(&dir, "big.json");
    assert!(run(&["init-random", "--layers", "5", "--width", "10", "--out", s(&big)]).status.success());
    let o = run(&["enumerate", s(&big)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2^50"));

    assert_eq!(run(&["enumerate", WORKED, "--box", "0", "1"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "/nonexistent/net.json"]).status.code(), Some(2));
}

#[test]
fn plot_writes_deterministic_svg() {
    let dir = TempDir::new().unwrap();
    let one = write_one_neuron(&dir);
    let (a, b) = (path(&dir, "a.svg"), path(&dir, "b.svg"));
    for p in [&a, &b] {
        assert!(run(&["plot", s(&one), "--box", "-10", "10", "-10", "10", "--out", s(p)]).status.success());
    }
    let svg = std::fs::read_to_string(&a).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 2);
    assert!(svg.contains("version=\"1.1\""));
    assert_eq!(svg.as_bytes(), std::fs::read(&b).unwrap().as_slice());

    let wide = path(&dir, "wide.json");
    assert!(run(&["init-random", "--layers", "1", "--width", "2", "--input-dim", "3", "--out", s(&wide)])
        .status
        .success());
    assert_eq!(run(&["plot", s(&wide), "--out", s(&a)]).status.code(), Some(2));
}

#[test]
fn compare_skips_csv_and_single_trial() {
    let dir = TempDir::new().unwrap();
    let csv = path(&dir, "t.csv");
    let o = run(&["compare-skips", "--layers", "3", "--width", "2", "--skips", "1-3", "--trials", "3", "--csv", s(&csv)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,variant,seed,region_count,wall_ms");
    assert_eq!(lines.len(), 7);
    assert!(stdout(&o).contains("U = "));

    let o = run(&["compare-skips", "--layers", "3", "--width", "2", "--skips", "1-3", "--trials", "1"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("warning"));
    assert!(!out.contains("reject"));
}

#[test]
fn cache_stats_edges() {
    let o = run(&["cache-stats", WORKED, "--offset", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("hit rate 1.000000"));
    let o = run(&["cache-stats", WORKED, "--grid-start", "1", "--grid-end", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("hit rate 0.000000"));
    assert_eq!(run(&["cache-stats", WORKED, "--train-fn", "phi9"]).status.code(), Some(2));
}

#[test]
fn predict_miss_then_hit_through_cache_file() {
    let dir = TempDir::new().unwrap();
    let cache = path(&dir, "cache.json");
    let first = stdout(&run(&["predict", WORKED, "--x", "0.4,0.2", "--cache", s(&cache)]));
    let second = stdout(&run(&["predict", WORKED, "--x", "0.4,0.2", "--cache", s(&cache)]));
    assert!(first.contains("region 11|01 miss"), "{first}");
    assert!(second.contains("region 11|01 hit"), "{second}");
    let output = |t: &str| t.lines().find(|l| l.starts_with("output: ")).unwrap().to_string();
    assert_eq!(output(&first), output(&second));

    let v: Vec<f64> = serde_json::from_str(output(&first).trim_start_matches("output: ")).unwrap();
    // Forward pass of the example network at (0.4, 0.2).
    assert!((v[0] - 3.55).abs() < 1e-12, "{v:?}");

    assert_eq!(run(&["predict", WORKED, "--x", "0.4,abc"]).status.code(), Some(2));
    assert_eq!(run(&["predict", WORKED, "--x", "0.4,0.2,1"]).status.code(), Some(2));
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_relu-regions"))
        .args(["enumerate", WORKED])
        .env("RELU_REGIONS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_relu-regions"))
        .args(["enumerate", WORKED])
        .env("RELU_REGIONS_THREADS", "1")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("8 regions"));
}
