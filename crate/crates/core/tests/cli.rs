mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::{corpus_dir, corpus_files};
use foclite::syntax::parse_source;

fn foclite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foclite")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn corpus() -> String {
    corpus_dir().display().to_string()
}

/// A copy of the corpus with one more file appended to the index.
fn corpus_plus(dir: &Path, extra: &str) {
    for f in corpus_files() {
        std::fs::copy(&f, dir.join(f.file_name().unwrap())).unwrap();
    }
    let mut index = std::fs::read_to_string(corpus_dir().join("index.txt")).unwrap();
    index.push_str("extra.fcl\n");
    std::fs::write(dir.join("index.txt"), index).unwrap();
    std::fs::write(dir.join("extra.fcl"), extra).unwrap();
}

#[test]
fn check_corpus() {
    let o = foclite(&["check", &corpus()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().count() > 20);
    for l in out.lines() {
        assert!(l.starts_with("THEOREM ") && l.contains(" PROVED "), "{l}");
    }
    assert!(out.contains("THEOREM Binary_relations.union_is_left_unique <3>1 PROVED -"));
    assert!(out.contains("THEOREM Finite_parts_by_lists.release_spec <1>f PROVED -"));
    assert_eq!(stderr(&o), "");
}

#[test]
fn output_is_deterministic() {
    let a = foclite(&["check", &corpus()]);
    let b = foclite(&["check", &corpus()]);
    let c = foclite(&["check", "--jobs", "4", &corpus()]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let x = foclite(&["deps", &corpus()]);
    let y = foclite(&["deps", &corpus()]);
    assert_eq!(x.stdout, y.stdout);
}

#[test]
fn empty_file_checks_clean() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("empty.fcl");
    std::fs::write(&f, "").unwrap();
    let o = foclite(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn redefinition_invalidates_only_equal_spec() {
    let dir = tempfile::tempdir().unwrap();
    corpus_plus(
        dir.path(),
        "species Strict (A is Setoid, B is Setoid) = inherit Binary_relations(A, B);\n  let equal(x, y) = is_contained(x, y);\nend;;\n",
    );
    let o = foclite(&["check", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("THEOREM Strict.equal_spec invalidated UNPROVED -"), "{out}");
    for n in ["equal_reflexive", "equal_symmetric", "equal_transitive"] {
        assert!(out.contains(&format!("THEOREM Strict.{n} inherited PROVED -")), "{n}");
    }
    assert!(stderr(&o).contains("E-INVALIDATED"));
}

#[test]
fn failed_step_is_located() {
    let dir = tempfile::tempdir().unwrap();
    corpus_plus(dir.path(), "");
    let file = dir.path().join("binary_relations.fcl");
    let text = std::fs::read_to_string(&file).unwrap();
    let broken = text.replacen("by hypothesis H11, H12, Hlu1 definition", "by hypothesis H11, H12 definition", 1);
    assert_ne!(text, broken);
    std::fs::write(&file, broken).unwrap();
    let o = foclite(&["check", "--json", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("THEOREM Binary_relations.union_is_left_unique <3>1 FAILED -"));
    let diags: Vec<serde_json::Value> = stderr(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let d = diags.iter().find(|d| d["code"] == "E-OBLIGATION").expect("an obligation error");
    assert_eq!(d["step"], "<3>1");
    assert_eq!(d["severity"], "error");
    assert!(d["file"].as_str().unwrap().ends_with("binary_relations.fcl"));
    assert!(d["line"].as_u64().unwrap() > 1);
    for k in ["col", "message"] {
        assert!(!d[k].is_null());
    }
}

#[test]
fn eval_examples() {
    for (expr, want) in [
        ("cardinal(from_list([]))", "0"),
        ("belongs(1, from_list([]))", "false"),
        ("release(from_list([1;2;1]), 1)", "[2]"),
        ("from_list([3; 4])", "[3; 4]"),
    ] {
        let o = foclite(&["eval", &corpus(), "IntFiniteParts", expr]);
        assert_eq!(o.status.code(), Some(0), "{expr}: {}", stderr(&o));
        assert_eq!(stdout(&o), format!("{want}\n"), "{expr}");
    }
}

#[test]
fn eval_errors() {
    let o = foclite(&["eval", &corpus(), "Nowhere", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E-UNKNOWN-COLLECTION"));
    let o = foclite(&["eval", &corpus(), "IntFiniteParts", "belongs(true, empty)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error["), "{}", stderr(&o));
    let o = foclite(&["eval", "--fuel", "3", &corpus(), "IntFiniteParts", "cardinal(from_list([1;2;3;4]))"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E-FUEL"));
    let o = foclite(&["eval", &corpus(), "IntFiniteParts", "cardinal("]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E-SYNTAX"));
}

#[test]
fn deps_edges() {
    let o = foclite(&["deps", &corpus()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    for e in [
        "Binary_relations.equal_spec -> def:equal",
        "Binary_relations.equal_reflexive -> decl:equal_spec",
        "Binary_relations.union_is_left_unique -> def:is_union_r",
        "Binary_relations.union_is_left_unique -> def:is_left_unique",
        "Setoid.same_is_not_different -> def:different",
        "Injective_relations.injective_union -> decl:union_is_left_unique",
    ] {
        assert!(lines.contains(&e), "{e}");
    }
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("e.fcl");
    std::fs::write(&f, "species Nothing = end;;\n").unwrap();
    let o = foclite(&["deps", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}

#[test]
fn fmt_round_trips() {
    for f in corpus_files() {
        let o = foclite(&["fmt", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let original = parse_source(&std::fs::read_to_string(&f).unwrap()).unwrap();
        assert_eq!(parse_source(&stdout(&o)).unwrap(), original, "{}", f.display());
    }
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(foclite(&["check"]).status.code(), Some(2));
    assert_eq!(foclite(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(foclite(&["check", "/nonexistent/file.fcl"]).status.code(), Some(2));
    assert_eq!(foclite(&["check", "--jobs", "0", &corpus()]).status.code(), Some(2));
}

#[test]
fn elaboration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.fcl");
    std::fs::write(&f, "species Loop = let rec f(l : list(int)) : int = f(l) termination proof = structural l; end;;\n").unwrap();
    let o = foclite(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("E-NONSTRUCTURAL"), "{}", stderr(&o));
    std::fs::write(&f, "species Broken = let x = ;\n").unwrap();
    let o = foclite(&["check", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
