use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/four_vars_n2000.csv")
}

fn ggmsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggmsel")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn select_dot(dir: &TempDir, extra: &[&str]) -> String {
    let dot = dir.path().join("g.dot");
    let input = fixture();
    let mut args = vec!["select", "--input", path_str(&input), "--out-dot", path_str(&dot)];
    args.extend_from_slice(extra);
    let out = ggmsel(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(dot).unwrap()
}

fn dot_edges(dot: &str) -> Vec<String> {
    dot.lines().filter(|l| l.contains("--")).map(|l| l.trim().to_string()).collect()
}

#[test]
fn fixture_recovers_four_cycle_edges() {
    let dir = TempDir::new().unwrap();
    let dot = select_dot(&dir, &["--method", "holm", "--alpha", "0.1", "--seed", "7"]);
    assert!(dot.starts_with("graph G {"));
    assert_eq!(dot_edges(&dot), ["\"x1\" -- \"x2\";", "\"x2\" -- \"x4\";", "\"x3\" -- \"x4\";"]);
}

#[test]
fn select_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = fixture();
    let mut reports = Vec::new();
    for k in 0..2 {
        let report = dir.path().join(format!("r{k}.json"));
        let out = ggmsel(&[
            "select", "--input", path_str(&input), "--method", "maxt-step", "--mc-draws", "2000", "--seed", "3",
            "--out-report", path_str(&report),
        ]);
        assert_eq!(code(&out), 0);
        reports.push(fs::read(report).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let text = String::from_utf8(reports.pop().unwrap()).unwrap();
    assert!(text.contains("\"method\": \"maxt-step\""));
}

#[test]
fn prior_present_edge_is_kept_and_absent_edge_is_dropped() {
    let dir = TempDir::new().unwrap();
    let present = dir.path().join("present.txt");
    let absent = dir.path().join("absent.txt");
    fs::write(&present, "p=4\n1 -- 3\n").unwrap();
    fs::write(&absent, "p=4\n# known to be missing\n3 -- 4\n").unwrap();
    let dot = select_dot(
        &dir,
        &["--method", "holm", "--alpha", "0.1", "--prior-present", path_str(&present), "--prior-absent", path_str(&absent)],
    );
    let edges = dot_edges(&dot);
    assert!(edges.contains(&"\"x1\" -- \"x3\";".to_string()));
    assert!(!edges.contains(&"\"x3\" -- \"x4\";".to_string()));
}

#[test]
fn overlapping_priors_are_rejected() {
    let dir = TempDir::new().unwrap();
    let prior = dir.path().join("prior.txt");
    fs::write(&prior, "p=4\n1 -- 2\n").unwrap();
    let input = fixture();
    let out = ggmsel(&[
        "select", "--input", path_str(&input), "--prior-present", path_str(&prior), "--prior-absent", path_str(&prior),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_alpha_is_a_usage_error() {
    let input = fixture();
    let out = ggmsel(&["select", "--input", path_str(&input), "--alpha", "1.5"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error["));
}

#[test]
fn dag_needs_an_order() {
    let input = fixture();
    let out = ggmsel(&["select", "--input", path_str(&input), "--graph", "dag"]);
    assert_eq!(code(&out), 2);
    let ok = ggmsel(&["select", "--input", path_str(&input), "--graph", "dag", "--order", "x1,x2,x3,x4"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
}

#[test]
fn empty_input_is_rejected() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    assert_eq!(code(&ggmsel(&["select", "--input", path_str(&empty)])), 2);
    assert_eq!(code(&ggmsel(&["adjust", "--input", path_str(&empty), "--method", "holm"])), 2);
}

fn adjust(dir: &TempDir, contents: &str, method: &str) -> Vec<(String, f64, f64)> {
    let input = dir.path().join("p.csv");
    let out_path = dir.path().join(format!("adj-{method}.csv"));
    fs::write(&input, contents).unwrap();
    let out = ggmsel(&["adjust", "--input", path_str(&input), "--method", method, "--out", path_str(&out_path)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("label,p,adjusted"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn adjust_holm_values() {
    let dir = TempDir::new().unwrap();
    let rows = adjust(&dir, "label,p\na,0.01\nb,0.04\nc,0.001\n", "holm");
    let adjusted: Vec<f64> = rows.iter().map(|r| r.2).collect();
    for (got, want) in adjusted.iter().zip([0.02, 0.04, 0.003]) {
        assert!((got - want).abs() < 1e-12, "{adjusted:?}");
    }
}

#[test]
fn single_pvalue_is_unchanged_by_every_method() {
    let dir = TempDir::new().unwrap();
    for method in ["bonferroni", "holm", "sidak", "sidak-step"] {
        let rows = adjust(&dir, "a,0.037\n", method);
        assert_eq!(rows.len(), 1);
        assert!((rows[0].2 - 0.037).abs() < 1e-12, "{method}: {rows:?}");
    }
    for method in ["maxt", "maxt-step"] {
        let rows = adjust(&dir, "a,0.037\n", method);
        // Monte-Carlo estimate with 10000 draws; five standard errors
        assert!((rows[0].2 - 0.037).abs() < 0.01, "{method}: {rows:?}");
    }
}

#[test]
fn zero_replicates_is_rejected() {
    let out = ggmsel(&["simulate", "--fig2", "--reps", "0"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn small_simulation_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let mut tables = Vec::new();
    for k in 0..2 {
        let out_path = dir.path().join(format!("s{k}.csv"));
        let out = ggmsel(&[
            "simulate", "--fig2", "--sizes", "50", "--methods", "holm,maxt-step", "--reps", "20", "--mc-draws", "1000",
            "--seed", "9", "--out", path_str(&out_path),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        tables.push(fs::read_to_string(out_path).unwrap());
    }
    assert_eq!(tables[0], tables[1]);
    let mut lines = tables[0].lines();
    assert_eq!(lines.next(), Some("method,n,rate,stderr,R"));
    assert_eq!(lines.count(), 2);
}
