use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hcut::tree_io::parse_tree;
use serde_json::Value;

fn hcut(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hcut"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn zoo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/zoo.csv")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn cluster_writes_a_valid_json_tree() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "0,0\n1,0\n0,1\n5,5\n5,6\n");
    let tree = dir.path().join("tree.json");
    let out = hcut(&["cluster", "--algo", "prc", "--sigma", "5", "--seed", "7", &input, "-o", tree.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&tree).unwrap();
    let _: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parse_tree(&text).unwrap().n(), 5);
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "0,0\n1,0\n0,1\n5,5\n5,6\n2,2\n");
    for algo in ["prc", "al", "sl", "opt"] {
        let args = ["cluster", "--algo", algo, "--sigma", "2", "--seed", "3", "--evaluate", &input];
        let (a, b) = (hcut(&args), hcut(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{algo}");
    }
}

#[test]
fn cluster_then_evaluate_agree() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "0.5\n0.1\n2.0\n2.2\n3.9\n1.1\n");
    for algo in ["prc", "rc", "al", "sl", "greedy", "opt"] {
        let tree = dir.path().join(format!("{algo}.nwk"));
        let report = dir.path().join(format!("{algo}.json"));
        let out = hcut(&[
            "cluster", "--algo", algo, "--sigma", "1", "--evaluate", "--format", "newick", &input,
            "-o", tree.to_str().unwrap(), "--report", report.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        let first: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        let out = hcut(&["evaluate", tree.to_str().unwrap(), &input, "--sigma", "1"]);
        assert!(out.status.success());
        let second: Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(first["f_plus"], second["f_plus"], "{algo}");
        assert_eq!(second["bounds"].as_object().unwrap().len(), 3);
        assert!(second["ratios"]["1D-MAX-upper"].as_f64().unwrap() <= 1.0 + 1e-12);
    }
}

#[test]
fn report_lists_fields_in_fixed_order() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "0,0\n1,0\n0,1\n");
    let out = hcut(&["cluster", "--algo", "al", "--sigma", "1", "--evaluate", &input, "-o", dir.path().join("t").to_str().unwrap()]);
    let text = stdout(&out);
    let keys = ["\"f_plus\"", "\"f_minus\"", "\"bounds\"", "\"ratios\"", "\"skipped\""];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
    // Two-dimensional data: the 1D bounds are skipped with a reason.
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["skipped"].as_array().unwrap().len(), 2);
    assert!(v["bounds"]["MAX-upper"].is_number());
}

#[test]
fn two_point_tree_scores_zero() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "0,1\n3,4\n");
    let tree = write(dir.path(), "t.nwk", "(1,0);\n");
    let out = hcut(&["evaluate", &tree, &input, "--sigma", "1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["f_plus"].as_f64().unwrap(), 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "0,0\n1,0\n0,1\n");
    // Gate: n above the materialization limit.
    let out = hcut(&["cluster", "--algo", "al", "--sigma", "1", "--materialize-limit", "2", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("average_linkage"));
    // Missing file.
    let out = hcut(&["cluster", "--sigma", "1", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(1));
    // Bad flags, before reading anything.
    let out = hcut(&["cluster", "--sigma", "-1", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hcut(&["cluster", "/nonexistent/file.csv"]);
    assert_eq!(out.status.code(), Some(2));
    // Ragged CSV names the row.
    let bad = write(dir.path(), "bad.csv", "0,0\n1\n");
    let out = hcut(&["cluster", "--sigma", "1", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 2"));
    // Leaf-count mismatch.
    let tree = write(dir.path(), "t.nwk", "(0,1);");
    let out = hcut(&["evaluate", &tree, &input, "--sigma", "1"]);
    assert_eq!(out.status.code(), Some(2));
    // Random cut on 2D data.
    let out = hcut(&["cluster", "--algo", "rc", "--sigma", "1", &input]);
    assert_eq!(out.status.code(), Some(2));
    // Optimum beyond 10 points.
    let many: String = (0..11).map(|i| format!("{i}\n")).collect();
    let many = write(dir.path(), "many.csv", &many);
    let out = hcut(&["cluster", "--algo", "opt", "--sigma", "1", &many]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zoo_ingestion() {
    let zoo = zoo();
    let zoo = zoo.to_str().unwrap();
    let out = hcut(&["cluster", "--algo", "prc", "--header", "--label-col", "0", "--sigma", "5", "--format", "newick", zoo]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(parse_tree(&stdout(&out)).unwrap().n(), 101);
}

#[test]
fn weight_matrix_input() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.csv", "0,0.9,0.1\n0.9,0,0.2\n0.1,0.2,0\n");
    let out = hcut(&["cluster", "--algo", "al", "--weights", "--evaluate", "--format", "newick", &w]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "((0,1),2);");
    let v: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert!((v["f_plus"].as_f64().unwrap() - 0.9).abs() < 1e-15);
    let out = hcut(&["cluster", "--algo", "prc", "--weights", &w]);
    assert_eq!(out.status.code(), Some(2));
    let asym = write(dir.path(), "a.csv", "0,0.9\n0.8,0\n");
    assert_eq!(hcut(&["cluster", "--algo", "al", "--weights", &asym]).status.code(), Some(2));
}

#[test]
fn perturbation_breaks_the_four_point_tie() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "four.csv", "0\n6\n12\n18\n");
    let exact = hcut(&["cluster", "--algo", "al", "--sigma", "1", "--format", "newick", &input]);
    assert_eq!(stdout(&exact).trim(), "((0,1),(2,3));");
    let out = hcut(&["gen", "--family", "four-point", "--delta", "6", "--shift", "6e-6"]);
    let shifted = write(dir.path(), "shifted.csv", &stdout(&out));
    let al = hcut(&["cluster", "--algo", "al", "--sigma", "1", "--format", "newick", &shifted]);
    assert_eq!(stdout(&al).trim(), "((0,(1,2)),3);");
    let jitter = hcut(&["cluster", "--algo", "al", "--sigma", "1", "--perturb", "1e-9", "--seed", "4", &input]);
    assert!(jitter.status.success());
}

#[test]
fn trace_file_has_one_event_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.csv", "0\n1\n3\n7\n8\n");
    for (algo, key) in [("al", "merge"), ("rc", "split"), ("prc", "split")] {
        let trace = dir.path().join(format!("{algo}.jsonl"));
        let out = hcut(&["cluster", "--algo", algo, "--sigma", "1", &input, "--trace", trace.to_str().unwrap()]);
        assert!(out.status.success());
        let text = fs::read_to_string(&trace).unwrap();
        assert_eq!(text.lines().count(), 4);
        for line in text.lines() {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v.get(key).is_some(), "{line}");
        }
    }
}

#[test]
fn gen_families_feed_the_clusterer() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["--family", "four-point", "--delta", "1"],
        &["--family", "spaced-line", "--n", "8", "--delta", "6", "--epsilon", "0.01", "--sigma", "1"],
        &["--family", "clique-embed", "--n", "8", "--tau", "0.1", "--sigma", "1"],
        &["--family", "graph-encode", "--n", "4", "--edges", "0-1,1-2,2-3", "--epsilon", "0.1"],
        &["--family", "graph-encode", "--n", "5", "--edge-prob", "0.5", "--epsilon", "0.1"],
        &["--family", "random-1d", "--n", "9", "--seed", "2"],
        &["--family", "gaussian-cloud", "--n", "9", "--d", "3", "--seed", "2"],
        &["--family", "clique-embed", "--n", "27", "--tau", "0.1", "--sigma", "1", "--jl-dim", "5"],
    ];
    for (k, case) in cases.iter().enumerate() {
        let mut args = vec!["gen"];
        args.extend_from_slice(case);
        let out = hcut(&args);
        assert!(out.status.success(), "{case:?}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = write(dir.path(), &format!("{k}.csv"), &stdout(&out));
        for algo in ["prc", "al", "sl"] {
            let out = hcut(&["cluster", "--algo", algo, "--sigma", "1", "--evaluate", &csv]);
            assert!(out.status.success(), "{case:?} {algo}");
        }
    }
    assert_eq!(hcut(&["gen", "--family", "clique-embed", "--n", "9", "--tau", "0.1", "--sigma", "1"]).status.code(), Some(2));
    assert_eq!(hcut(&["gen", "--family", "spaced-line", "--n", "8"]).status.code(), Some(2));
}

#[test]
fn gen_descriptor_round_trip() {
    let out = hcut(&["gen", "--family", "random-1d", "--n", "5", "--seed", "9", "--print-spec"]);
    let spec = stdout(&out);
    let v: Value = serde_json::from_str(&spec).unwrap();
    assert_eq!(v["family"], "random_1d");
    let from_flags = hcut(&["gen", "--family", "random-1d", "--n", "5", "--seed", "9"]);
    let from_spec = hcut(&["gen", "--spec", spec.trim()]);
    assert_eq!(from_flags.stdout, from_spec.stdout);
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "spec.json", &spec);
    assert_eq!(hcut(&["gen", "--spec", &file]).stdout, from_flags.stdout);
    assert_eq!(hcut(&["gen", "--spec", "{\"family\":\"nope\"}"]).status.code(), Some(2));
}

#[test]
fn bench_reports_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("bench.csv");
    let out = hcut(&["bench", "--sizes", "1,200", "--dim", "8", "--trials", "1", "-o", report.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&report).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "size,pass_seconds,prc_seconds");
    let sizes: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(sizes, vec!["1", "200"]);

    let input = write(dir.path(), "in.csv", "0,0\n1,0\n0,1\n");
    let out = hcut(&["bench", "--sizes", "2,3", "--input", &input, "--include-io", "--trials", "1"]);
    assert!(out.status.success());
    let out = hcut(&["bench", "--sizes", "10", "--input", &input]);
    assert_eq!(out.status.code(), Some(2));
}
