use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn groundfix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groundfix")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn apsp_on_a_three_node_path() {
    let dir = TempDir::new().unwrap();
    let facts = write(&dir, "g.facts", "R(a, b) = 3.\nR(b, c) = 4.\nR(a, c) = 9.\n");
    let o = groundfix(&["run", "--program", "corpus:apsp", "--facts", &facts, "--semiring", "tropical"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "T(a,b)\t3\nT(a,c)\t7\nT(b,c)\t4\n");
}

#[test]
fn boolean_closure_with_node_weights() {
    let dir = TempDir::new().unwrap();
    let facts = write(&dir, "g.facts", "R(a,b). R(b,c). U(a). U(b). U(c).");
    let o = groundfix(&["run", "--program", "corpus:node_weighted_tc", "--facts", &facts]);
    assert_eq!(stdout(&o), "T(a,b)\ttrue\nT(a,c)\ttrue\nT(b,c)\ttrue\n");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let cycle = write(&dir, "cycle.facts", "R(a, a) = 1.");
    let o = groundfix(&["run", "--program", "corpus:tc", "--facts", &cycle, "--semiring", "naturals"]);
    assert_eq!(o.status.code(), Some(5));
    let o = groundfix(&["run", "--program", "corpus:tc", "--facts", &cycle, "--semiring", "tropical", "--solver", "rank"]);
    assert_eq!(o.status.code(), Some(3));
    let points = write(&dir, "points.facts", "AddressOf(p, a). Assign(q, p).");
    let o = groundfix(&["run", "--program", "corpus:andersen", "--facts", &points, "--strategy", "linear"]);
    assert_eq!(o.status.code(), Some(3));
    let o = groundfix(&["run", "--program", "corpus:tc", "--facts", &cycle, "--semiring", "tropical", "--cap-size", "2"]);
    assert_eq!(o.status.code(), Some(4));
    let o = groundfix(&["run", "--program", "corpus:tc", "--facts", &dir.path().join("missing").to_string_lossy()]);
    assert_eq!(o.status.code(), Some(1));
    let bad = write(&dir, "bad.dl", "T(x) :- R(x)\n");
    let o = groundfix(&["run", "--program", &bad, "--facts", &cycle]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.dl:2:1"));
    let o = groundfix(&["run", "--program", "corpus:tc", "--facts", &cycle, "--semiring", "reals"]);
    assert_eq!(o.status.code(), Some(2));
    let o = groundfix(&["--help"]);
    assert!(stdout(&o).contains("6  check found a disagreement"));
}

#[test]
fn check_reports_agreement_and_detects_faults() {
    let o = groundfix(&["check", "--program", "corpus:same_generation", "--semiring", "tropical", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).contains("DIFF"));
    let o = groundfix(&["check", "--program", "corpus:tc", "--semiring", "boolean", "--seed", "4", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(6));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected true, found 0"));
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "empty.facts", "");
    let o = groundfix(&["check", "--program", "corpus:ternary_monadic", "--facts", &empty]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn outputs_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let facts = write(&dir, "g.facts", "R(a,b) = 2. R(b,c) = 1. R(c,a) = 5. U(b) = 0.");
    for args in [
        vec!["run", "--program", "corpus:sssp", "--semiring", "tropical", "--output", "json", "--explain"],
        vec!["ground", "--program", "corpus:node_weighted_tc", "--semiring", "tropical"],
        vec!["ground", "--program", "corpus:node_weighted_tc", "--semiring", "tropical", "--output", "json"],
    ] {
        let mut args = args.clone();
        args.extend(["--facts", facts.as_str()]);
        let a = groundfix(&args);
        let b = groundfix(&args);
        assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.stderr, b.stderr);
    }
    let bench = ["bench", "--program", "corpus:tc", "--family", "grid", "--sizes", "9,16", "--seed", "3"];
    assert_eq!(groundfix(&bench).stdout, groundfix(&bench).stdout);
}

#[test]
fn bench_with_empty_schedule_prints_header() {
    let o = groundfix(&["bench", "--program", "corpus:five_atom_monadic", "--sizes", ""]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("program,family,size,m,n,"));
}

#[test]
fn classify_prints_flags() {
    let o = groundfix(&["classify", "--program", "corpus:sssp"]);
    assert_eq!(stdout(&o), "monadic=true linear=true chain=false acyclic=true free-connex=true\n");
    assert!(Path::new(env!("CARGO_BIN_EXE_groundfix")).exists());
}
