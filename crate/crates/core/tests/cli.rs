use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn autgram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_autgram")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn graph_file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const C4: &str = "4 4\n1 2\n2 3\n3 4\n4 1\n";
const STAR5: &str = "5 4\n1 5\n2 5\n3 5\n4 5\n";

#[test]
fn validate_c4() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "c4.edges", C4);
    let o = autgram(&["validate", "--graph", s(&g)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("language 8 == 8"));
    assert!(out.contains("parse_trees 8 == 8"));
    assert!(out.contains("annotations 8 == 8"));
    let o = autgram(&["validate", "--graph", s(&g), "--path"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn embed_then_count() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "star5.edges", STAR5);
    let out = dir.path().join("s.json");
    let o = autgram(&["embed", "--graph", s(&g), "--keep", "4", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim().split(' ').count(), 4);
    let o = autgram(&["count", s(&out)]);
    assert_eq!(stdout(&o), "24\n");
    let o = autgram(&["enum", s(&out), "--cap", "5"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(stderr(&o).contains("truncated"));
}

#[test]
fn preconditions_exit_3() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "dis.edges", "4 2\n1 2\n3 4\n");
    let out = dir.path().join("x.json");
    let o = autgram(&["build", "--graph", s(&g), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr(&o), "precondition: graph not connected\n");
    assert!(!out.exists());

    let p3 = graph_file(&dir, "p3.edges", "3 2\n1 2\n2 3\n");
    let o = autgram(&["embed", "--graph", s(&p3), "--keep", "2", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("precondition: prefix [2] is not invariant"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(autgram(&["nonsense"]).status.code(), Some(2));
    assert_eq!(autgram(&["build"]).status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = graph_file(&dir, "bad.edges", "3 2\n1 2\n");
    let o = autgram(&["build", "--graph", s(&bad), "--out", s(&dir.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn build_is_deterministic_and_queryable() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "c4.edges", C4);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let oa = autgram(&["build", "--graph", s(&g), "--out", s(&a)]);
    let ob = autgram(&["build", "--graph", s(&g), "--out", s(&b)]);
    assert_eq!(stdout(&oa), stdout(&ob));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let alpha = stdout(&oa).trim().to_string();
    let stats = stdout(&autgram(&["stats", s(&a)]));
    assert!(stats.contains("regular false"));
    assert!(stats.lines().any(|l| l.starts_with("size ")));

    let words = stdout(&autgram(&["enum", s(&a)]));
    assert_eq!(words.lines().count(), 8);
    let first = words.lines().next().unwrap();
    assert_eq!(stdout(&autgram(&["member", s(&a), "--word", first])), "true\n");
    assert_eq!(stdout(&autgram(&["member", s(&a), "--word", "1 2 3"])), "false\n");
    assert_eq!(alpha.split(' ').count(), 4);

    let p = dir.path().join("p.json");
    autgram(&["build", "--graph", s(&g), "--path", "--out", s(&p)]);
    assert!(stdout(&autgram(&["stats", s(&p)])).contains("regular true"));
}

#[test]
fn lift_and_check() {
    let dir = TempDir::new().unwrap();
    let g = graph_file(&dir, "c4.edges", C4);
    let gr = dir.path().join("c4.json");
    autgram(&["build", "--graph", s(&g), "--out", s(&gr)]);
    let lp = dir.path().join("c4.lp");
    let o = autgram(&["lift", s(&gr), "--out", s(&lp)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&lp).unwrap();
    assert!(text.starts_with("Minimize\n obj: 0\nSubject To\n"));

    let words = stdout(&autgram(&["enum", s(&gr)]));
    for w in words.lines() {
        assert_eq!(stdout(&autgram(&["check", s(&lp), "--point", w])), "feasible\n");
    }
    let mid = "5/2 5/2 5/2 5/2";
    assert_eq!(stdout(&autgram(&["check", s(&gr), "--point", mid])), "feasible\n");
    let o = autgram(&["check", s(&lp), "--point", "1 2"]);
    assert_eq!(o.status.code(), Some(2));

    let m = dir.path().join("m.lp");
    autgram(&["lift", s(&gr), "--out", s(&m), "--matrix"]);
    assert!(fs::read_to_string(&m).unwrap().contains("z_1_1"));
}
