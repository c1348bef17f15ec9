mod common;

use std::collections::HashMap;

use common::*;
use foclite::kernel::*;
use proptest::prelude::*;

fn s() -> Sort {
    Sort::carrier("S")
}

fn v(n: &str) -> Term {
    Term::var(n, s())
}

fn p(t: Term) -> Formula {
    Formula::Atom(Term::app("p", vec![t], Sort::Bool))
}

fn q(a: Term, b: Term) -> Formula {
    Formula::Atom(Term::app("q", vec![a, b], Sort::Bool))
}

fn axioms(species: &str, name: &str) -> Vec<String> {
    let env = corpus_env();
    let typed = &env.species[species].typed;
    unfold_definition(name, typed, &View::own()).unwrap().into_iter().map(|a| a.axiom.to_string()).collect()
}

#[test]
fn unfold_logical_definition() {
    assert_eq!(
        axioms("Binary_relations", "is_left_unique"),
        ["all r : Self, is_left_unique(r) <-> (all a1 : A, all a2 : A, all b : B, \
          relation(r, a1, b) /\\ relation(r, a2, b) -> A!equal(a1, a2))"]
    );
}

#[test]
fn unfold_constant_and_recursive_definitions() {
    assert_eq!(axioms("Finite_parts_by_lists", "empty"), ["empty = []"]);
    assert_eq!(
        axioms("Finite_parts_by_lists", "belongs"),
        [
            "all x : S, belongs(x, []) <-> false",
            "all x : S, all h : S, all q : list(S), belongs(x, h :: q) <-> S!equal(h, x) \\/ belongs(x, q)"
        ]
    );
    assert_eq!(
        axioms("Finite_parts_by_lists", "release"),
        [
            "all s : S, release([], s) = []",
            "all h : S, all t : list(S), all s : S, S!equal(s, h) -> release(h :: t, s) = release(t, s)",
            "all h : S, all t : list(S), all s : S, not S!equal(s, h) -> release(h :: t, s) = h :: release(t, s)"
        ]
    );
}

#[test]
fn unfold_declared_only_is_an_error() {
    let env = corpus_env();
    let typed = &env.species["Binary_relations"].typed;
    assert_eq!(unfold_definition("relation", typed, &View::own()), Err(KernelError::NotDefined("relation".into())));
}

#[test]
fn unfold_through_a_parameter() {
    let env = corpus_env();
    let typed = &env.species["Setoid"].typed;
    let ax = unfold_definition("different", typed, &View::through("A")).unwrap();
    assert_eq!(ax[0].axiom.to_string(), "all x : A, all y : A, A!different(x, y) <-> not A!equal(x, y)");
    assert_eq!(ax[0].source, "A!different");
}

#[test]
fn if_in_boolean_definition_lifts_to_guards() {
    let env = with_corpus(
        "species T = signature c : int -> bool; let f(x : int) : bool = if c(x) then c(x + 1) else false;
           let g(x : int) : int = if c(x) then 1 else if c(0) then 2 else 3; end;;",
    )
    .unwrap();
    let typed = &env.species["T"].typed;
    let f = unfold_definition("f", typed, &View::own()).unwrap();
    assert_eq!(f[0].axiom.to_string(), "all x : int, f(x) <-> (c(x) -> c((x + 1))) /\\ (not c(x) -> false)");
    let g: Vec<String> = unfold_definition("g", typed, &View::own()).unwrap().iter().map(|a| a.axiom.to_string()).collect();
    assert_eq!(
        g,
        [
            "all x : int, c(x) -> g(x) = 1",
            "all x : int, not c(x) /\\ c(0) -> g(x) = 2",
            "all x : int, not c(x) /\\ not c(0) -> g(x) = 3"
        ]
    );
}

#[test]
fn substitute_examples() {
    let a = Sort::carrier("A");
    let b = Sort::carrier("B");
    let rel = |x: Term| Formula::Atom(Term::app("relation", vec![Term::var("r", Sort::carrier("Self")), x, Term::var("b", b.clone())], Sort::Bool));
    let f = Formula::all("b", b.clone(), rel(Term::var("a", a.clone())));
    let g = f.substitute(&HashMap::from([("a".to_string(), Term::var("a1", a.clone()))])).unwrap();
    assert_eq!(g.to_string(), "all b : B, relation(r, a1, b)");

    let shadow = Formula::all("a", a.clone(), Formula::Atom(Term::app("p", vec![Term::var("a", a.clone())], Sort::Bool)));
    let same = shadow.substitute(&HashMap::from([("a".to_string(), Term::var("t", a.clone()))])).unwrap();
    assert_eq!(same, shadow);

    let capture = Formula::all("y", s(), q(v("x"), v("y")));
    let out = capture.substitute(&HashMap::from([("x".to_string(), v("y"))])).unwrap();
    let Formula::All(binder, _, body) = &out else { panic!() };
    assert_ne!(binder, "y");
    assert_eq!(**body, q(v("y"), v(binder)));

    let bad = p(v("x")).substitute(&HashMap::from([("x".to_string(), Term::Int(1.into()))]));
    assert!(matches!(bad, Err(KernelError::TypeMismatch { .. })));
}

#[test]
fn induction_on_trivial_goal() {
    let l = Sort::list(s());
    let goal = Formula::all("l", l.clone(), Formula::Eq(Term::var("l", l.clone()), Term::var("l", l)));
    let sch = induction_scheme(&goal).unwrap();
    assert_eq!(sch.base.to_string(), "[] = []");
    assert_eq!(sch.hypothesis.to_string(), "t = t");
    assert_eq!(sch.step.to_string(), "h :: t = h :: t");
    assert_eq!(sch.hypothesis_name, "HI");
    assert!(matches!(induction_scheme(&Formula::all("x", s(), p(v("x")))), Err(KernelError::NotInductiveGoal(_))));
}

#[test]
fn induction_on_release_spec() {
    let env = corpus_env();
    let typed = &env.species["Finite_parts_by_lists"].typed;
    let stmt = formula(&typed.statements["release_spec"].formula, &View::own()).unwrap();
    // all x : list(S), all t1 t2 : S, ...  with the inner quantifiers moved out
    // fixing e1 e2 and inducting on l.
    let Formula::All(x, ls, body) = stmt else { panic!() };
    let Formula::All(t1, _, body) = *body else { panic!() };
    let Formula::All(t2, _, body) = *body else { panic!() };
    let body = body
        .substitute(&HashMap::from([
            (t1, Term::var("e1", s())),
            (t2, Term::var("e2", s())),
            (x.clone(), Term::var("l", ls.clone())),
        ]))
        .unwrap();
    let goal = Formula::all("l", ls, body);
    let sch = induction_scheme(&goal).unwrap();
    assert_eq!(sch.base.to_string(), "belongs(e1, release([], e2)) <-> S!different(e1, e2) /\\ belongs(e1, [])");
    assert_eq!(sch.hypothesis.to_string(), "belongs(e1, release(t, e2)) <-> S!different(e1, e2) /\\ belongs(e1, t)");
    assert_eq!(sch.step.to_string(), "belongs(e1, release(h :: t, e2)) <-> S!different(e1, e2) /\\ belongs(e1, h :: t)");
}

#[test]
fn induction_names_are_fresh() {
    let l = Sort::list(s());
    let goal = Formula::all(
        "l",
        l.clone(),
        Formula::Atom(Term::app("r", vec![Term::var("l", l.clone()), Term::var("h", s()), Term::var("t", l)], Sort::Bool)),
    );
    let sch = induction_scheme(&goal).unwrap();
    let free = goal.free_vars();
    assert!(!free.contains_key(&sch.head) && !free.contains_key(&sch.tail));
    assert!(induction_scheme_with(&goal, "h", "u").is_err());
}

// Random formulas over S with unary p, binary q, unary function f and
// constants a, b.

fn arb_term(vars: Vec<&'static str>) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        proptest::sample::select(vars).prop_map(v),
        Just(Term::app("a", vec![], s())),
        Just(Term::app("b", vec![], s())),
    ];
    leaf.prop_recursive(2, 6, 1, |inner| inner.prop_map(|t| Term::app("f", vec![t], s())))
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let names = vec!["x", "y", "z"];
    let atom = prop_oneof![
        arb_term(names.clone()).prop_map(p),
        (arb_term(names.clone()), arb_term(names.clone())).prop_map(|(a, b)| q(a, b)),
        (arb_term(names.clone()), arb_term(names)).prop_map(|(a, b)| Formula::Eq(a, b)),
    ];
    atom.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (proptest::sample::select(vec!["x", "y", "z"]), inner.clone()).prop_map(|(x, b)| Formula::all(x, s(), b)),
            (proptest::sample::select(vec!["x", "y", "z"]), inner).prop_map(|(x, b)| Formula::ex(x, s(), b)),
        ]
    })
}

/// Locally nameless reference: bound variables are indices.
#[derive(Clone, Debug, PartialEq)]
enum Db {
    Atom(DbTerm),
    Eq(DbTerm, DbTerm),
    Not(Box<Db>),
    Bin(u8, Box<Db>, Box<Db>),
    Quant(bool, Sort, Box<Db>),
    Const(bool),
}

#[derive(Clone, Debug, PartialEq)]
enum DbTerm {
    Bound(usize),
    Free(String),
    App(String, Vec<DbTerm>),
    Other(Term),
}

fn db_term(t: &Term, env: &[String]) -> DbTerm {
    match t {
        Term::Var(n, _) => match env.iter().rposition(|x| x == n) {
            Some(i) => DbTerm::Bound(env.len() - 1 - i),
            None => DbTerm::Free(n.clone()),
        },
        Term::App(f, args, _) => DbTerm::App(f.clone(), args.iter().map(|a| db_term(a, env)).collect()),
        other => DbTerm::Other(other.clone()),
    }
}

fn to_db(f: &Formula, env: &mut Vec<String>) -> Db {
    match f {
        Formula::True => Db::Const(true),
        Formula::False => Db::Const(false),
        Formula::Atom(t) => Db::Atom(db_term(t, env)),
        Formula::Eq(a, b) => Db::Eq(db_term(a, env), db_term(b, env)),
        Formula::Not(a) => Db::Not(Box::new(to_db(a, env))),
        Formula::And(a, b) => Db::Bin(0, Box::new(to_db(a, env)), Box::new(to_db(b, env))),
        Formula::Or(a, b) => Db::Bin(1, Box::new(to_db(a, env)), Box::new(to_db(b, env))),
        Formula::Implies(a, b) => Db::Bin(2, Box::new(to_db(a, env)), Box::new(to_db(b, env))),
        Formula::Iff(a, b) => Db::Bin(3, Box::new(to_db(a, env)), Box::new(to_db(b, env))),
        Formula::All(x, s, b) | Formula::Ex(x, s, b) => {
            env.push(x.clone());
            let body = to_db(b, env);
            env.pop();
            Db::Quant(matches!(f, Formula::All(..)), s.clone(), Box::new(body))
        }
    }
}

fn db_subst_term(t: &DbTerm, x: &str, by: &DbTerm) -> DbTerm {
    match t {
        DbTerm::Free(n) if n == x => by.clone(),
        DbTerm::App(f, args) => DbTerm::App(f.clone(), args.iter().map(|a| db_subst_term(a, x, by)).collect()),
        other => other.clone(),
    }
}

/// The replacement has only free names, so no shifting is needed.
fn db_subst(f: &Db, x: &str, by: &DbTerm) -> Db {
    match f {
        Db::Atom(t) => Db::Atom(db_subst_term(t, x, by)),
        Db::Eq(a, b) => Db::Eq(db_subst_term(a, x, by), db_subst_term(b, x, by)),
        Db::Not(a) => Db::Not(Box::new(db_subst(a, x, by))),
        Db::Bin(k, a, b) => Db::Bin(*k, Box::new(db_subst(a, x, by)), Box::new(db_subst(b, x, by))),
        Db::Quant(k, s, b) => Db::Quant(*k, s.clone(), Box::new(db_subst(b, x, by))),
        Db::Const(c) => Db::Const(*c),
    }
}

/// Rename every binder named `x` to `fresh` (which occurs nowhere).
fn rename_binders(f: &Formula, x: &str, fresh: &str) -> Formula {
    match f {
        Formula::All(y, s, b) | Formula::Ex(y, s, b) => {
            let inner = rename_binders(b, x, fresh);
            let (name, body) = if y == x {
                (fresh.to_string(), inner.substitute(&HashMap::from([(x.to_string(), Term::var(fresh, s.clone()))])).unwrap())
            } else {
                (y.clone(), inner)
            };
            if matches!(f, Formula::All(..)) {
                Formula::all(&name, s.clone(), body)
            } else {
                Formula::ex(&name, s.clone(), body)
            }
        }
        Formula::Not(a) => Formula::not(rename_binders(a, x, fresh)),
        Formula::And(a, b) => Formula::and(rename_binders(a, x, fresh), rename_binders(b, x, fresh)),
        Formula::Or(a, b) => Formula::or(rename_binders(a, x, fresh), rename_binders(b, x, fresh)),
        Formula::Implies(a, b) => Formula::implies(rename_binders(a, x, fresh), rename_binders(b, x, fresh)),
        Formula::Iff(a, b) => Formula::iff(rename_binders(a, x, fresh), rename_binders(b, x, fresh)),
        other => other.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn substitution_agrees_with_de_bruijn(f in arb_formula(), x in proptest::sample::select(vec!["x", "y", "z"]), t in arb_term(vec!["x", "y", "z"])) {
        let by = db_term(&t, &[]);
        let expected = db_subst(&to_db(&f, &mut Vec::new()), x, &by);
        let got = f.substitute(&HashMap::from([(x.to_string(), t)])).unwrap();
        prop_assert_eq!(to_db(&got, &mut Vec::new()), expected);
    }

    #[test]
    fn alpha_equivalence_is_an_equivalence(f in arb_formula(), g in arb_formula()) {
        prop_assert!(f.alpha_eq(&f));
        prop_assert_eq!(f.alpha_eq(&g), g.alpha_eq(&f));
        let renamed = rename_binders(&f, "x", "w");
        prop_assert!(f.alpha_eq(&renamed));
        let again = rename_binders(&renamed, "y", "u");
        prop_assert!(renamed.alpha_eq(&again) && f.alpha_eq(&again));
    }

    #[test]
    fn substitution_respects_alpha(f in arb_formula(), t in arb_term(vec!["x", "y", "z"])) {
        let g = rename_binders(&f, "y", "w");
        let m = HashMap::from([("x".to_string(), t)]);
        prop_assert!(f.substitute(&m).unwrap().alpha_eq(&g.substitute(&m).unwrap()));
    }

    #[test]
    fn alpha_matches_de_bruijn(f in arb_formula(), g in arb_formula()) {
        prop_assert_eq!(f.alpha_eq(&g), to_db(&f, &mut Vec::new()) == to_db(&g, &mut Vec::new()));
    }
}

/// Brute-force model over S = {0, 1} and lists of length at most 3.
mod scheme_soundness {
    use super::*;

    #[derive(Clone, Debug, PartialEq)]
    enum Val {
        E(u8),
        L(Vec<u8>),
        B(bool),
    }

    fn lists(max: usize) -> Vec<Vec<u8>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max {
            let mut next = Vec::new();
            for l in &layer {
                for e in 0..2u8 {
                    let mut m = vec![e];
                    m.extend(l);
                    next.push(m);
                }
            }
            out.extend(next.clone());
            layer = next;
        }
        out
    }

    fn eval_t(t: &Term, env: &HashMap<String, Val>, table: &[bool]) -> Val {
        match t {
            Term::Var(n, _) => env[n].clone(),
            Term::Nil(_) => Val::L(vec![]),
            Term::Cons(h, tl) => {
                let (Val::E(h), Val::L(mut tl)) = (eval_t(h, env, table), eval_t(tl, env, table)) else { panic!() };
                tl.insert(0, h);
                Val::L(tl)
            }
            // `r(l)`: an arbitrary predicate on lists given by a table.
            Term::App(f, args, _) if f == "r" => {
                let Val::L(l) = eval_t(&args[0], env, table) else { panic!() };
                let idx = lists(3).iter().position(|m| *m == l).unwrap();
                Val::B(table[idx])
            }
            _ => unreachable!(),
        }
    }

    fn holds(f: &Formula, env: &mut HashMap<String, Val>, table: &[bool]) -> bool {
        match f {
            Formula::Atom(t) => eval_t(t, env, table) == Val::B(true),
            Formula::Implies(a, b) => !holds(a, env, table) || holds(b, env, table),
            Formula::All(x, sort, b) => {
                let domain: Vec<Val> = match sort {
                    Sort::List(_) => lists(2).into_iter().map(Val::L).collect(),
                    _ => (0..2).map(Val::E).collect(),
                };
                domain.into_iter().all(|d| {
                    env.insert(x.clone(), d);
                    holds(b, env, table)
                })
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn base_and_step_imply_goal_on_small_lists() {
        let ls = Sort::list(s());
        let goal = Formula::all("l", ls.clone(), Formula::Atom(Term::app("r", vec![Term::var("l", ls)], Sort::Bool)));
        let sch = induction_scheme(&goal).unwrap();
        let n = lists(3).len();
        let mut premises_held = 0;
        for bits in 0u32..(1 << n) {
            let table: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            let mut env = HashMap::new();
            let base = holds(&sch.base, &mut env, &table);
            let step = holds(&sch.step_statement(), &mut env, &table);
            if base && step {
                premises_held += 1;
                assert!(table.iter().all(|b| *b), "scheme unsound for table {table:?}");
            }
        }
        assert!(premises_held >= 1);
    }
}
