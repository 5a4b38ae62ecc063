use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn dca(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dca"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(stdout: &str) -> Value {
    serde_json::from_str(stdout.trim()).expect("one JSON line")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

// star with centre 0 and three leaves, unit thresholds and values
const STAR: &str = "\
dca undirected 4 3 1 4
node 0 1 1
node 1 1 1
node 2 1 1
node 3 1 1
edge 0 1 1
edge 0 2 1
edge 0 3 1
";

#[test]
fn planners_emit_strategy_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("star.txt");
    fs::write(&inst, STAR).unwrap();

    let runs: [(&[&str], &str); 6] = [
        (&["solve-exact"], "exact"),
        (&["perfect"], "perfect"),
        (&["ba", "--epsilon", "0.5"], "ba"),
        (&["ba", "--epsilon", "0.5", "--tau-grid", "5"], "ba-tau"),
        (&["greedy"], "greedy"),
        (&["greedy", "--realloc"], "greedy-r"),
    ];
    for (args, name) in runs {
        let out = dir.path().join(format!("{name}.strategy"));
        let mut full = args.to_vec();
        full.extend(["--instance", path(&inst), "--out", path(&out)]);
        let (ok, stdout, stderr) = dca(&full);
        assert!(ok, "{name}: {stderr}");
        let summary = json(&stdout);
        assert_eq!(summary["algorithm"], name);
        assert_eq!(summary["budget"], 4.0);
        assert!(summary["runtime_ms"].as_f64().unwrap() >= 0.0);
        assert!(out.exists(), "{name} wrote no strategy");
        if name == "exact" || name == "perfect" {
            assert_eq!(summary["result"], 0.0);
        }
    }
}

#[test]
fn perfect_reports_null_when_impossible() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("star.txt");
    fs::write(&inst, STAR.replacen(" 4\n", " 3\n", 1)).unwrap();
    let (ok, stdout, stderr) = dca(&["perfect", "--instance", path(&inst)]);
    assert!(ok, "{stderr}");
    assert!(json(&stdout)["result"].is_null());
}

#[test]
fn realloc_reports_loss_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("one.txt");
    let alloc = dir.path().join("one.alloc");
    fs::write(&inst, "dca undirected 1 0 1 0.75\nnode 0 1 1\n").unwrap();
    fs::write(&alloc, "alloc 0 0.75\n").unwrap();
    let (ok, stdout, stderr) = dca(&[
        "realloc",
        "--instance",
        path(&inst),
        "--alloc",
        path(&alloc),
        "--attack",
        "0",
        "--lp-bound",
    ]);
    assert!(ok, "{stderr}");
    let report = json(&stdout);
    assert_eq!(report["loss"], 1.0);
    assert_eq!(report["null_loss"], 1.0);
    assert!((report["lp_bound"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!(report["transfers"].as_array().unwrap().is_empty());
}

#[test]
fn generated_instances_feed_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("g.txt");
    let (ok, _, stderr) = dca(&[
        "gen",
        "gnp",
        "--n",
        "5",
        "--p",
        "0.4",
        "--seed",
        "3",
        "--out",
        path(&inst),
    ]);
    assert!(ok, "{stderr}");

    let (ok, stdout, stderr) = dca(&["oracle", "--instance", path(&inst)]);
    assert!(ok, "{stderr}");
    let oracle = json(&stdout)["result"].as_f64().unwrap();
    let (ok, stdout, stderr) = dca(&["solve-exact", "--instance", path(&inst)]);
    assert!(ok, "{stderr}");
    let exact = json(&stdout)["result"].as_f64().unwrap();
    assert!(
        (oracle - exact).abs() < 1e-6,
        "oracle {oracle} vs exact {exact}"
    );
    assert!(dir.path().join("g.txt.exact.strategy").exists());
}

#[test]
fn gen_is_deterministic() {
    let a = dca(&[
        "gen", "powerlaw", "--n", "30", "--m", "2", "--p-tri", "0.3", "--seed", "9",
    ]);
    let b = dca(&[
        "gen", "powerlaw", "--n", "30", "--m", "2", "--p-tri", "0.3", "--seed", "9",
    ]);
    assert!(a.0 && b.0);
    assert_eq!(a.1, b.1);
    assert!(a.1.starts_with("dca undirected 30 "));
}

#[test]
fn vc_gadget_and_lp_export() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("tri.txt");
    let lp = dir.path().join("tri.lp");
    // a triangle needs two cover vertices
    let (ok, _, stderr) = dca(&[
        "gen",
        "vcgadget",
        "--n",
        "3",
        "--edges",
        "0-1,1-2,0-2",
        "--budget",
        "2",
        "--out",
        path(&inst),
    ]);
    assert!(ok, "{stderr}");
    let (ok, stdout, stderr) = dca(&[
        "solve-exact",
        "--instance",
        path(&inst),
        "--lp-file",
        path(&lp),
    ]);
    assert!(ok, "{stderr}");
    assert!(json(&stdout)["result"].as_f64().unwrap() <= 1.0 + 1e-6);
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize") || text.contains("minimize"));
}

#[test]
fn suite_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.conf");
    let csv = dir.path().join("results.csv");
    fs::write(
        &cfg,
        "generator = gnp\nn = 8\np = 0.3\ncount = 2\nseed = 1\nalgorithms = greedy, greedy-r, exact\n",
    )
    .unwrap();
    let (ok, _, stderr) = dca(&["suite", "--config", path(&cfg), "--out", path(&csv)]);
    assert!(ok, "{stderr}");
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("instance,algorithm,result,runtime_ms,budget")
    );
    assert!(lines.filter(|l| l.contains(",exact,")).count() == 2);
}

#[test]
fn bad_input_fails_cleanly() {
    let (ok, _, stderr) = dca(&["solve-exact", "--instance", "/nonexistent/file"]);
    assert!(!ok);
    assert!(stderr.starts_with("error:"));
}
