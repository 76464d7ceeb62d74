use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iconicity::keypoint::{serialize_sequence, FrameSequence, Landmark, PoseFrame, REQUIRED_POSE_POINTS};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iconicity"))
}

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(rel)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gesture(id: &str, word: &str, n: usize) -> FrameSequence {
    let frames = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let mut pose: std::collections::BTreeMap<String, Landmark> =
                REQUIRED_POSE_POINTS.iter().map(|k| (k.to_string(), Landmark::new(0.5, 0.6))).collect();
            pose.insert("nose".into(), Landmark::new(0.5, 0.2));
            pose.insert("left_shoulder".into(), Landmark::new(0.3, 0.5));
            pose.insert("right_shoulder".into(), Landmark::new(0.7, 0.5));
            pose.insert("right_wrist".into(), Landmark::new(0.6 + 0.1 * t, 0.7 - 0.4 * t));
            let hand =
                (0..21).map(|k| Landmark::new(0.6 + 0.01 * k as f64, 0.7 - 0.02 * k as f64 * (1.0 + t))).collect();
            PoseFrame { pose, left_hand: None, right_hand: Some(hand) }
        })
        .collect();
    FrameSequence { gesture_id: id.into(), word: word.into(), fps: Some(30.0), frames }
}

#[test]
fn extract_one_valid_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, serialize_sequence(&gesture("g1", "wave", 6))).unwrap();
    let out = dir.path().join("profiles.json");
    let o = run(&["extract", p(&g), "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let corpus = iconicity::corpus::load_corpus(&out).unwrap();
    assert_eq!(corpus.len(), 1);
    let rec = corpus.get("g1").unwrap();
    assert_eq!(rec.iconicity_rating, None);
    assert!(rec.profile.right.is_some() && rec.profile.left.is_none());
}

#[test]
fn extract_partial_failure_keeps_valid_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    std::fs::write(&good, serialize_sequence(&gesture("g1", "wave", 4))).unwrap();
    std::fs::write(&bad, b"{ not json").unwrap();
    let out = dir.path().join("profiles.json");
    let o = run(&["extract", p(&good), p(&bad), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.json"), "{}", stderr(&o));
    assert_eq!(iconicity::corpus::load_corpus(&out).unwrap().len(), 1);
}

#[test]
fn extract_without_files_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["extract", "--out", p(&dir.path().join("x.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn assign_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let o = run(&[
        "assign",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--wordvec",
        p(&fixture("golden/vectors.txt")),
        "--targets",
        p(&fixture("golden/targets.json")),
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let got = std::fs::read(&out).unwrap();
    assert_eq!(got, std::fs::read(fixture("golden/expected_assignments.json")).unwrap());
    // A second run is byte-identical.
    let out2 = dir.path().join("out2.json");
    let o = run(&[
        "assign",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--wordvec",
        p(&fixture("golden/vectors.txt")),
        "--targets",
        p(&fixture("golden/targets.json")),
        "--out",
        p(&out2),
    ]);
    assert!(o.status.success());
    assert_eq!(std::fs::read(&out2).unwrap(), got);
}

#[test]
fn assign_missing_wordvec_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope-vectors.txt");
    let o = run(&[
        "assign",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--wordvec",
        p(&missing),
        "--targets",
        p(&fixture("golden/targets.json")),
        "--out",
        p(&dir.path().join("out.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope-vectors.txt"), "{}", stderr(&o));
}

fn count_assigned(path: &Path) -> usize {
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    v.as_array().unwrap().iter().filter(|r| r["outcome"] == "assigned").count()
}

#[test]
fn assign_config_paths_and_higher_tau() {
    let dir = tempfile::tempdir().unwrap();
    let strict = dir.path().join("strict.json");
    std::fs::write(
        &strict,
        format!(
            r#"{{"tau": 0.9, "corpus_path": "{}", "wordvec_path": "{}"}}"#,
            p(&fixture("golden/corpus.json")),
            p(&fixture("golden/vectors.txt"))
        ),
    )
    .unwrap();
    let out_default = dir.path().join("default.json");
    let out_strict = dir.path().join("strict-out.json");
    let o = run(&[
        "assign",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--wordvec",
        p(&fixture("golden/vectors.txt")),
        "--targets",
        p(&fixture("golden/targets.json")),
        "--out",
        p(&out_default),
    ]);
    assert!(o.status.success());
    let o = run(&[
        "assign",
        "--targets",
        p(&fixture("golden/targets.json")),
        "--config",
        p(&strict),
        "--out",
        p(&out_strict),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(count_assigned(&out_strict) <= count_assigned(&out_default));
}

#[test]
fn assign_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tau": 0.3, "threshold": 1}"#).unwrap();
    let o = run(&[
        "assign",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--wordvec",
        p(&fixture("golden/vectors.txt")),
        "--targets",
        p(&fixture("golden/targets.json")),
        "--config",
        p(&cfg),
        "--out",
        p(&dir.path().join("out.json")),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn evaluate_count_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let o = run(&[
        "evaluate",
        "--assignments",
        p(&fixture("accuracy/assignments.json")),
        "--manual",
        p(&fixture("accuracy/manual.txt")),
        "--json",
        p(&json),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("(21/26)"), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();
    assert_eq!(report["n_targets"], 30);
    assert_eq!(report["n_unassigned"], 4);
    assert_eq!(report["n_correct"], 21);
}

#[test]
fn evaluate_empty_assignments_is_undefined() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    std::fs::write(&a, "[]").unwrap();
    let o = run(&["evaluate", "--assignments", p(&a), "--manual", p(&fixture("accuracy/manual.txt"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("accuracy: undefined"), "{}", stdout(&o));
}

#[test]
fn evaluate_missing_manual_rating_fails() {
    let dir = tempfile::tempdir().unwrap();
    let manual = dir.path().join("manual.txt");
    let full = std::fs::read_to_string(fixture("accuracy/manual.txt")).unwrap();
    let trimmed: Vec<&str> = full.lines().filter(|l| !l.starts_with("t17 ")).collect();
    std::fs::write(&manual, trimmed.join("\n")).unwrap();
    let o = run(&["evaluate", "--assignments", p(&fixture("accuracy/assignments.json")), "--manual", p(&manual)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("t17"), "{}", stderr(&o));
}

#[test]
fn neighbors_lists_rounds() {
    let o = run(&[
        "neighbors",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--targets",
        p(&fixture("golden/targets.json")),
        "--id",
        "t1",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["gesture_id"], "t1");
    assert_eq!(v[0]["rounds"].as_array().unwrap().len(), 2);
    // c02 ranks first in round 0 but its gloss misses the word threshold, so
    // the golden assignment falls through to c03.
    let ids: Vec<&str> =
        v[0]["rounds"][0]["entries"].as_array().unwrap().iter().map(|e| e["record_id"].as_str().unwrap()).collect();
    assert_eq!(&ids[..2], ["c02", "c03"]);

    let o = run(&[
        "neighbors",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--targets",
        p(&fixture("golden/targets.json")),
        "--id",
        "zzz",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn import_embeddings_and_add_records() {
    let dir = tempfile::tempdir().unwrap();
    let emb = dir.path().join("emb.txt");
    std::fs::write(&emb, "c01 R movement 0.5 0.5 0.5\n").unwrap();
    let out = dir.path().join("c.json");
    let o = run(&[
        "import-embeddings",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--embeddings",
        p(&emb),
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c = iconicity::corpus::load_corpus(&out).unwrap();
    let hand = c.get("c01").unwrap().profile.right.as_ref().unwrap();
    assert_eq!(hand.movement.vector, vec![0.5, 0.5, 0.5]);

    std::fs::write(&emb, "c01 R movement 0.5 0.5\n").unwrap();
    let o = run(&[
        "import-embeddings",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--embeddings",
        p(&emb),
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));

    let ratings = dir.path().join("ratings.txt");
    std::fs::write(&ratings, "t2 3.5\n").unwrap();
    let merged = dir.path().join("merged.json");
    let o = run(&[
        "add-records",
        "--corpus",
        p(&fixture("golden/corpus.json")),
        "--records",
        p(&fixture("golden/targets.json")),
        "--ratings",
        p(&ratings),
        "--out",
        p(&merged),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let c = iconicity::corpus::load_corpus(&merged).unwrap();
    assert_eq!(c.len(), 13);
    assert_eq!(c.get("t2").unwrap().iconicity_rating, Some(3.5));
    assert_eq!(c.get("t1").unwrap().iconicity_rating, None);

    // Adding the same records again collides on ids.
    let o = run(&[
        "add-records",
        "--corpus",
        p(&merged),
        "--records",
        p(&fixture("golden/targets.json")),
        "--out",
        p(&merged),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_expression() {
    let o = run(&["check-expression", "h1  b0 m2 h3 b1 |   empty"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "h1 b0 m2 h3 b1 | empty");
    assert_eq!(run(&["check-expression", "empty | empty"]).status.code(), Some(1));
    assert_eq!(run(&["check-expression", "h1 m2 | empty"]).status.code(), Some(1));
}
