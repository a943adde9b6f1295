use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn phonolint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phonolint"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/synthetic_wordlist.tsv")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_clean_file() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(
        tmp.path(),
        "w.tsv",
        "concept_id\tvariety_id\tform\nc1\tA\ttaka\nc2\tA\tpina\nc3\tA\tmuku\n",
    );
    let o = phonolint(&["validate", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "0 issues");
}

#[test]
fn validate_warns_on_vowelless_form() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(
        tmp.path(),
        "w.tsv",
        "concept_id\tvariety_id\tform\nc1\tA\ttaka\nc2\tA\tpst\n",
    );
    let o = phonolint(&["validate", &f]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("`pst`"), "{out}");
    assert!(out.contains("1 warning"), "{out}");
}

#[test]
fn validate_missing_form_column() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(tmp.path(), "w.tsv", "concept_id\tvariety_id\nc1\tA\n");
    let o = phonolint(&["validate", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("1 error"));
}

#[test]
fn unreadable_file_fails() {
    let o = phonolint(&["validate", "/nonexistent/wordlist.tsv"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn syllable_analysis_under_character_setup_is_usage_error() {
    let o = phonolint(&[
        "score",
        "/nonexistent.tsv",
        "--setup",
        "character",
        "--analysis",
        "within_syllable",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn lof_on_small_variety_suggests_k() {
    let tmp = tempfile::tempdir().unwrap();
    let mut text = String::from("concept_id\tvariety_id\tform\n");
    for (i, f) in [
        "taka", "pina", "muku", "sapa", "kuti", "nata", "lipa", "tamu", "kasi", "pulu",
    ]
    .iter()
    .enumerate()
    {
        text.push_str(&format!("c{i}\tA\t{f}\n"));
    }
    let f = write(tmp.path(), "w.tsv", &text);
    let o = phonolint(&["score", &f, "--algorithm", "lof"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--k"));
    assert_eq!(
        phonolint(&["score", &f, "--algorithm", "lof", "--k", "3"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn grid_without_gold_is_explicit_error() {
    let tmp = tempfile::tempdir().unwrap();
    let f = write(
        tmp.path(),
        "w.tsv",
        "concept_id\tvariety_id\tform\nc1\tA\ttaka\n",
    );
    let o = phonolint(&["grid", &f, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gold"));
}

#[test]
fn score_report_layout_and_recall() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = fixture();
    let before = std::fs::read(&fixture).unwrap();
    let out = tmp.path().join("run");
    let o = phonolint(&[
        "score",
        fixture.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(&fixture).unwrap(), before);

    let report = std::fs::read_to_string(out.join("scores.tsv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(lines.next(), Some("variety\tconcept\tform\tscore\tflagged"));
    let gold: std::collections::HashMap<(String, String), bool> = std::fs::read_to_string(&fixture)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            ((f[1].to_string(), f[0].to_string()), f[3] == "1")
        })
        .collect();
    let (mut tp, mut planted) = (0, 0);
    let mut prev: Option<(String, f64)> = None;
    for line in lines {
        let f: Vec<&str> = line.split('\t').collect();
        let score: f64 = f[3].parse().unwrap();
        if let Some((v, s)) = &prev {
            if v == f[0] {
                assert!(score <= *s, "not sorted within variety");
            }
        }
        prev = Some((f[0].to_string(), score));
        if gold[&(f[0].to_string(), f[1].to_string())] {
            planted += 1;
            tp += usize::from(f[4] == "1");
        }
    }
    assert_eq!(planted, 300);
    assert!(tp as f64 / planted as f64 >= 0.5, "recall {tp}/{planted}");

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(
        manifest["flags"]["config"],
        "syllable/boundary_phoneme/2+3/all"
    );
    assert_eq!(manifest["dataset"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn character_grid_files() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("grid");
    let o = phonolint(&[
        "grid",
        fixture().to_str().unwrap(),
        "--setup",
        "character",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let grid = std::fs::read_to_string(out.join("grid.tsv")).unwrap();
    assert_eq!(grid.lines().count(), 91);
    let pr = std::fs::read_to_string(out.join("pr_dump.csv")).unwrap();
    assert_eq!(
        pr.lines().next(),
        Some("algorithm,setup,analysis,combination,aggregation,precision,recall,f1")
    );
    assert_eq!(pr.lines().count(), 91);
    let top = std::fs::read_to_string(out.join("top10.tsv")).unwrap();
    let f1: Vec<f64> = top
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(8).unwrap().parse().unwrap())
        .collect();
    assert_eq!(f1.len(), 10);
    assert!(f1.windows(2).all(|w| w[0] >= w[1]));
    assert_eq!(stdout(&o).lines().count(), 11);
}

#[test]
fn fixture_command_reproduces_shipped_file() {
    let o = phonolint(&["fixture"]);
    assert!(o.status.success());
    assert_eq!(o.stdout, std::fs::read(fixture()).unwrap());
}
