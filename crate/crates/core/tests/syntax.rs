use foclite::syntax::ast::*;
use foclite::syntax::lexer::tokenize;
use foclite::syntax::{parse_formula, parse_source, print_unit, ParseError};
use std::path::PathBuf;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_files() -> Vec<(String, String)> {
    let index = std::fs::read_to_string(corpus_dir().join("index.txt")).unwrap();
    index
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let file = l.split_whitespace().next().unwrap().to_string();
            let text = std::fs::read_to_string(corpus_dir().join(&file)).unwrap();
            (file, text)
        })
        .collect()
}

fn species<'a>(unit: &'a SourceUnit, name: &str) -> &'a SpeciesDecl {
    unit.phrases
        .iter()
        .find_map(|p| match p {
            Phrase::Species(s) if s.name.name == name => Some(s),
            _ => None,
        })
        .unwrap()
}

#[test]
fn setoid_has_eight_methods() {
    let src = std::fs::read_to_string(corpus_dir().join("setoid.fcl")).unwrap();
    let unit = parse_source(&src).unwrap();
    let s = species(&unit, "Setoid");
    assert_eq!(s.methods.len(), 7);
    assert_eq!(s.inherits.len(), 1);
    // The inherit clause plus seven methods make the eight entries of the table.
    assert_eq!(s.inherits[0].name.name, "Basic_object");
}

#[test]
fn empty_species() {
    let unit = parse_source("species S = end;;").unwrap();
    assert_eq!(species(&unit, "S").methods.len(), 0);
    assert_eq!(print_unit(&SourceUnit::default()), "");
}

#[test]
fn implication_is_right_associative() {
    let f = parse_formula("all x: Self, q(x) -> r(x) -> s(x)").unwrap();
    let FormulaKind::All(_, _, body) = f.kind else { panic!() };
    let atom = |n: &str| FormulaKind::Atom(Expr::new(
        ExprKind::App { callee: n.into(), args: vec![Expr::new(ExprKind::Var("x".into()), Default::default())] },
        Default::default(),
    ));
    let f_ = |k| Box::new(Formula::new(k, Default::default()));
    let right = FormulaKind::Implies(f_(atom("q")), f_(FormulaKind::Implies(f_(atom("r")), f_(atom("s")))));
    let left = FormulaKind::Implies(f_(FormulaKind::Implies(f_(atom("q")), f_(atom("r")))), f_(atom("s")));
    assert_eq!(body.kind, right);
    assert_ne!(body.kind, left);
}

#[test]
fn or_binds_looser_than_and() {
    let f = parse_formula("a \\/ b /\\ c").unwrap();
    let FormulaKind::Or(_, rhs) = f.kind else { panic!("expected a disjunction") };
    assert!(matches!(rhs.kind, FormulaKind::And(..)));
    let f = parse_formula("a -> b <-> c").unwrap();
    assert!(matches!(f.kind, FormulaKind::Iff(..)));
}

#[test]
fn quantifier_extends_right() {
    let f = parse_formula("p(x) -> all y : Self, q(y) /\\ r(y)").unwrap();
    let FormulaKind::Implies(_, rhs) = f.kind else { panic!() };
    let FormulaKind::All(_, _, body) = rhs.kind else { panic!() };
    assert!(matches!(body.kind, FormulaKind::And(..)));
}

#[test]
fn missing_end_is_unterminated() {
    let err = parse_source("species S = signature f : Self;").unwrap_err();
    assert!(matches!(err, ParseError::UnterminatedSpecies { .. }), "{err:?}");
    let err = parse_source("species S = signature f : Self; end").unwrap_err();
    assert!(matches!(err, ParseError::UnterminatedSpecies { .. }), "{err:?}");
}

#[test]
fn syntax_error_reports_expected_set() {
    let err = parse_source("species S = signature : Self; end;;").unwrap_err();
    match err {
        ParseError::Syntax { expected, span, .. } => {
            assert_eq!(expected, vec!["identifier".to_string()]);
            assert_eq!(span.start, 22);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn let_rec_requires_termination() {
    assert!(parse_source("species S = let rec f(l) = f(l); end;;").is_err());
    assert!(parse_source("species S = let f(l) = l termination proof = structural l; end;;").is_err());
    assert!(parse_source("species S = let rec f(l) = f(l) termination proof = structural l; end;;").is_ok());
}

#[test]
fn duplicate_names_rejected() {
    let err = parse_source("species S = signature f : Self; signature f : Self; end;;").unwrap_err();
    assert!(matches!(err, ParseError::Duplicate { what: "method", .. }));
    let err = parse_source("species S = end;; species S = end;;").unwrap_err();
    assert!(matches!(err, ParseError::Duplicate { what: "phrase", .. }));
    let err = parse_source("species S (A is T, A is T) = end;;").unwrap_err();
    assert!(matches!(err, ParseError::Duplicate { what: "parameter", .. }));
    let err = parse_source("species S = let f = 1; let f = 2; end;;").unwrap_err();
    assert!(matches!(err, ParseError::Duplicate { what: "method", .. }));
    assert!(parse_source("species S = signature f : int; let f = 1; end;;").is_ok());
    // `proof of` completes a name instead of introducing one.
    assert!(parse_source("species S = property p : true; proof of p = conclude; end;;").is_ok());
}

#[test]
fn whitespace_before_argument_list() {
    let a = parse_formula("relation (r1, a, b)").unwrap();
    let b = parse_formula("relation(r1,a,b)").unwrap();
    assert_eq!(a, b);
}

#[test]
fn list_literals_desugar_to_cons() {
    let a = parse_formula("l = [1; 2]").unwrap();
    let b = parse_formula("l = 1 :: 2 :: []").unwrap();
    assert_eq!(a, b);
}

#[test]
fn table_two_structure() {
    let src = std::fs::read_to_string(corpus_dir().join("binary_relations.fcl")).unwrap();
    let unit = parse_source(&src).unwrap();
    let s = species(&unit, "Binary_relations");
    let proof = s
        .methods
        .iter()
        .find_map(|m| match &m.kind {
            MethodKind::Theorem { name, proof, .. } if name.name == "union_is_left_unique" => Some(proof),
            _ => None,
        })
        .unwrap();
    let Proof::Steps(root) = proof else { panic!() };
    assert_eq!(root.len(), 2);
    assert_eq!(root[0].label.to_string(), "<0>1");
    assert_eq!(root[1].label.to_string(), "<0>f");
    let StepBody::Prove { proof: Proof::Steps(level1), .. } = &root[0].body else { panic!() };
    assert_eq!(level1.iter().map(|s| s.label.to_string()).collect::<Vec<_>>(), ["<1>1", "<1>2", "<1>f"]);
    let StepBody::Prove { proof: Proof::Steps(level2), .. } = &level1[0].body else { panic!() };
    let StepBody::Prove { proof: Proof::Steps(level3), .. } = &level2[0].body else { panic!() };
    let labels: Vec<String> = level3.iter().map(|s| s.label.to_string()).collect();
    assert_eq!(labels, ["<3>1", "<3>2", "<3>3", "<3>4", "<3>f"]);
    let StepBody::Qed(Justification::By(c)) = &level3[4].body else { panic!() };
    assert_eq!(c.steps.len(), 4);
    assert_eq!(c.hypotheses.iter().map(|h| h.name.as_str()).collect::<Vec<_>>(), ["Hunion", "Ha1", "Ha2"]);
    assert_eq!(c.definitions[0].name, "is_union_r");
}

#[test]
fn corpus_round_trip() {
    for (file, text) in corpus_files() {
        let first = parse_source(&text).unwrap_or_else(|e| panic!("{file}: {e}"));
        let printed = print_unit(&first);
        let second = parse_source(&printed).unwrap_or_else(|e| panic!("{file} reprint: {e}\n{printed}"));
        assert_eq!(first, second, "{file}");
        assert_eq!(print_unit(&second), printed, "{file}: printing is not a fixpoint");
    }
}

fn check_spans_expr(src: &str, e: &Expr) {
    // Re-lexing a node's text must reproduce the node when reparsed.
    let text = e.span.text(src);
    assert!(tokenize(text).is_ok(), "span text {text:?} does not lex");
    let reparsed = foclite::syntax::parse_expr(text).unwrap_or_else(|err| panic!("{text:?}: {err}"));
    assert_eq!(&reparsed, e, "span text {text:?}");
}

fn check_spans_formula(src: &str, f: &Formula) {
    let text = f.span.text(src);
    let reparsed = parse_formula(text).unwrap_or_else(|err| panic!("{text:?}: {err}"));
    assert_eq!(&reparsed, f, "span text {text:?}");
    match &f.kind {
        FormulaKind::All(_, _, b) | FormulaKind::Ex(_, _, b) | FormulaKind::Not(b) => check_spans_formula(src, b),
        FormulaKind::And(a, b) | FormulaKind::Or(a, b) | FormulaKind::Implies(a, b) | FormulaKind::Iff(a, b) => {
            check_spans_formula(src, a);
            check_spans_formula(src, b);
        }
        FormulaKind::Atom(e) => check_spans_expr(src, e),
        FormulaKind::Eq(a, b) => {
            check_spans_expr(src, a);
            check_spans_expr(src, b);
        }
    }
}

#[test]
fn formula_spans_reparse_to_their_nodes() {
    for (_, text) in corpus_files() {
        let unit = parse_source(&text).unwrap();
        for p in &unit.phrases {
            let Phrase::Species(s) = p else { continue };
            for m in &s.methods {
                match &m.kind {
                    MethodKind::Property { formula, .. } | MethodKind::Theorem { formula, .. } => {
                        check_spans_formula(&text, formula)
                    }
                    MethodKind::Logical(def) => check_spans_formula(&text, &def.body),
                    _ => {}
                }
            }
        }
    }
}
