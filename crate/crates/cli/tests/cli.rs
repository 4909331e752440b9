use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flyterm::oracle::Digraph;
use serde_json::Value;

const T_EDGE: &str = "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))";

fn flyterm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flyterm")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_ct_on_edge_term() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(dir.path(), "t_edge.term", T_EDGE);
    let o = flyterm(&["check", "--automaton", "ct", "--term", s(&t)]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verdict"], "accepted");
    assert_eq!(v["accepted"], true);
    assert!(v["guard_failed"].is_null());
    assert_eq!(v["guards"]["irr"], true);
    assert!(v["guards"]["ct"].is_null());
    for key in ["nodes", "distinct_states", "max_state_bytes", "ndeg", "millis", "accepted"] {
        assert!(v["stats"].get(key).is_some(), "stats.{key}");
    }
}

#[test]
fn check_edg_matches_the_edge() {
    let dir = tempfile::tempdir().unwrap();
    // X = {vertex 1}, Y = {vertex 2}: bit 0 is X, bit 1 is Y
    let yes = file(dir.path(), "yes.term", "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1 10) (leaf 2 01)) (leaf -1))))");
    let no = file(dir.path(), "no.term", "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1 01) (leaf 2 10)) (leaf -1))))");
    assert_eq!(code(&flyterm(&["check", "--automaton", "edg", "--term", s(&yes)])), 0);
    let o = flyterm(&["check", "--automaton", "edg", "--term", s(&no)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["verdict"], "rejected");
}

#[test]
fn guard_failure_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(dir.path(), "bad.term", "(oplus (leaf 1 10) (leaf -1))");
    let o = flyterm(&["check", "--automaton", "edg", "--term", s(&t)]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["guard_failed"], "ct");
    assert_eq!(v["verdict"], "guard_failed");
    let o = flyterm(&["check", "--automaton", "edg", "--term", s(&t), "--assume-correct"]);
    assert_eq!(json(&o)["verdict"], "rejected");
}

#[test]
fn check_with_sets_file_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(dir.path(), "t.term", T_EDGE);
    // positions: root add is ε, leaves of vertex 1 and 2 are 1.1.1.1 and 1.1.1.2
    let sets = file(dir.path(), "sets.json", r#"{"vertex_sets": [["1.1.1.1"], ["1.1.1.2"]]}"#);
    let stats = dir.path().join("stats.json");
    let o = flyterm(&["check", "--automaton", "edg", "--term", s(&t), "--sets", s(&sets), "--stats", s(&stats)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let st: Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(st["accepted"], true);
    let o = flyterm(&["check", "--automaton", "link-ee", "--term", s(&t), "--seed", "3"]);
    assert!(matches!(code(&o), 0 | 1));
}

#[test]
fn check_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(dir.path(), "t.term", T_EDGE);
    assert_eq!(code(&flyterm(&["check", "--automaton", "nope", "--term", s(&t)])), 2);
    // unannotated term for an automaton reading two vertex bits
    assert_eq!(code(&flyterm(&["check", "--automaton", "edg", "--term", s(&t)])), 2);
    assert_eq!(code(&flyterm(&["check", "--automaton", "ct", "--term", "/nonexistent/t"])), 2);
    let broken = file(dir.path(), "broken.term", "(oplus (leaf 1)");
    assert_eq!(code(&flyterm(&["check", "--automaton", "ct", "--term", s(&broken)])), 2);
}

#[test]
fn eval_emits_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let t = file(dir.path(), "t.term", T_EDGE);
    let o = flyterm(&["eval", "--term", s(&t)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "p digraph 2 1\na 1 1 2\n");
    let e = file(dir.path(), "e.term", "(empty)");
    assert_eq!(stdout(&flyterm(&["eval", "--term", s(&e)])), "p digraph 0 0\n");
    let bad = file(dir.path(), "bad.term", "(leaf -1)");
    assert_eq!(code(&flyterm(&["eval", "--term", s(&bad)])), 2);
    let v = json(&flyterm(&["eval", "--term", s(&bad), "--emit", "stats"]));
    assert_eq!(v["e_vertices"], 1);
    assert_eq!(v["per_label"]["-1"], 1);
}

#[test]
fn td2term_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let g = file(dir.path(), "p4.graph", "p digraph 4 3\na 1 1 2\na 2 2 3\na 3 3 4\n");
    let td = file(dir.path(), "p4.td", "s td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n");
    let out = dir.path().join("p4.term");
    let o = flyterm(&["td2term", "--graph", s(&g), "--td", s(&td), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["D_used"].as_u64().unwrap() <= 5);
    assert!(v["C_used"].as_u64().unwrap() <= 2);
    assert_eq!(v["D_budget"], 5);
    assert_eq!(code(&flyterm(&["check", "--automaton", "ct", "--term", s(&out)])), 0);
    let back = Digraph::parse(&stdout(&flyterm(&["eval", "--term", s(&out)]))).unwrap();
    assert!(back.is_isomorphic(&Digraph::parse(&fs::read_to_string(&g).unwrap()).unwrap()));

    let wrong = file(dir.path(), "wrong.graph", "p digraph 4 1\na 1 1 4\n");
    let o = flyterm(&["td2term", "--graph", s(&wrong), "--td", s(&td)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("edge cover"));
}

#[test]
fn diff_commands() {
    let o = flyterm(&["diff", "dirham", "--trials", "300", "--max-n", "7"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["trials"], 300);
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
    assert_eq!(code(&flyterm(&["diff", "link-aa", "--exhaustive-small"])), 0);
    assert_eq!(code(&flyterm(&["diff", "edg", "--against", "composed-edg", "--trials", "200"])), 0);
    assert_eq!(code(&flyterm(&["diff", "edg", "--against", "ct"])), 2);
}

#[test]
fn bench_rows() {
    let o = flyterm(&["bench", "dirham", "--family", "cycle", "--sizes", "100,1000", "--repeat", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "size,nodes,millis,max_state_bytes,ndeg,accepted");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].ends_with(",true"));

    let o = flyterm(&["bench", "ct", "--family", "path", "--sizes", "50,500,5000", "--repeat", "1"]);
    let out = stdout(&o);
    let bytes: Vec<&str> = out.lines().skip(1).map(|r| r.split(',').nth(3).unwrap()).collect();
    assert!(bytes.windows(2).all(|w| w[0] == w[1]), "{bytes:?}");

    assert_eq!(code(&flyterm(&["bench", "ct", "--family", "path"])), 2);
    assert_eq!(code(&flyterm(&["bench", "ct", "--family", "path", "--sizes", "10,5"])), 2);
}

#[test]
fn gen_commands() {
    let o = flyterm(&["gen", "graph", "--n", "4", "--m", "5", "--seed", "2"]);
    assert!(stdout(&o).starts_with("p digraph 4 5\n"));
    let o = flyterm(&["gen", "term", "--seed", "9", "--widths", "2,0"]);
    assert_eq!(code(&o), 0);
    let term = stdout(&o);
    flyterm::parse_term(&term).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (g, td) = (dir.path().join("g"), dir.path().join("td"));
    assert_eq!(code(&flyterm(&["gen", "ktree", "--k", "2", "--n", "12", "--graph-out", s(&g), "--td-out", s(&td)])), 0);
    assert_eq!(code(&flyterm(&["td2term", "--graph", s(&g), "--td", s(&td)])), 0);
    assert_eq!(code(&flyterm(&["gen", "term", "--widths", "x"])), 2);
}

#[test]
fn list_and_cache_budget() {
    let v = json(&flyterm(&["list"]));
    assert_eq!(v.as_array().unwrap().len(), 13);
    let dir = tempfile::tempdir().unwrap();
    let t = file(dir.path(), "t.term", T_EDGE);
    let o = Command::new(env!("CARGO_BIN_EXE_flyterm"))
        .args(["check", "--automaton", "ct", "--term", s(&t)])
        .env("FLYTERM_CACHE_BYTES", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_flyterm"))
        .args(["check", "--automaton", "ct", "--term", s(&t)])
        .env("FLYTERM_CACHE_BYTES", "lots")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
