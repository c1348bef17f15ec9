mod common;

use common::axioms::AxiomOracle;
use common::{corpus_env, with_corpus};
use foclite::eval::{eval, eval_expr, EvalBudget, EvalError, Evaluator, Value};
use foclite::species::{typecheck_expr, Env};
use foclite::syntax::parse_expr;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn run(env: &Env, coll: &str, src: &str) -> Result<Value, EvalError> {
    let e = parse_expr(src).unwrap();
    let te = typecheck_expr(&e, coll, env).unwrap_or_else(|e| panic!("{src}: {e:?}"));
    eval_expr(env, coll, &te, EvalBudget::default())
}

fn show(env: &Env, coll: &str, src: &str) -> String {
    run(env, coll, src).unwrap().to_string()
}

fn ints(xs: &[i64]) -> Value {
    Value::list(xs.iter().map(|&x| Value::int(x)))
}

fn set(xs: &[i64]) -> Value {
    Value::opaque("IntFiniteParts", ints(xs))
}

fn elem(x: i64) -> Value {
    Value::opaque("IntSetoid", Value::int(x))
}

#[test]
fn surface_examples() {
    let env = corpus_env();
    assert_eq!(show(&env, "IntFiniteParts", "cardinal(from_list([]))"), "0");
    assert_eq!(show(&env, "IntFiniteParts", "belongs(1, from_list([]))"), "false");
    assert_eq!(show(&env, "IntFiniteParts", "release(from_list([1;2;1]), 1)"), "[2]");
    assert_eq!(show(&env, "IntFiniteParts", "if true then 1 else 0"), "1");
    assert_eq!(show(&env, "IntFiniteParts", "cardinal(from_list([1;1;2]))"), "3");
    assert_eq!(show(&env, "IntSetoid", "different(1, 2)"), "true");
}

#[test]
fn method_calls_across_the_boundary() {
    let env = corpus_env();
    let b = EvalBudget::default();
    assert_eq!(eval(&env, "IntFiniteParts", "cardinal", vec![set(&[])], b), Ok(Value::int(0)));
    assert_eq!(eval(&env, "IntFiniteParts", "belongs", vec![elem(1), set(&[])], b), Ok(Value::Bool(false)));
    let r = eval(&env, "IntFiniteParts", "release", vec![set(&[1, 2, 1]), elem(1)], b).unwrap();
    assert_eq!(r, set(&[2]));
    assert_eq!(r.to_string(), "[2]");
    let e = eval(&env, "IntSetoid", "element", vec![], b).unwrap();
    assert_eq!(e, elem(0));
}

#[test]
fn carriers_stay_abstract() {
    let env = corpus_env();
    let b = EvalBudget::default();
    // A plain list is not a set, and a set of one collection is not an element of another.
    assert!(matches!(eval(&env, "IntFiniteParts", "cardinal", vec![ints(&[1])], b), Err(EvalError::TypeError(_))));
    assert!(matches!(eval(&env, "IntFiniteParts", "belongs", vec![set(&[1]), set(&[1])], b), Err(EvalError::TypeError(_))));
    assert!(matches!(eval(&env, "IntFiniteParts", "release_spec", vec![], b), Err(EvalError::NotExecutable(_))));
    assert!(matches!(eval(&env, "Nowhere", "f", vec![], b), Err(EvalError::UnknownCollection(_))));
}

const PROBE: &str = "
species Probe =
  representation = int;
  let is_contained(x, y) = (x = y) || (x = 0);
  let equal(x, y) = is_contained(x, y) && is_contained(y, x);
  let flag(x : int) = (x = x);
  let lazy_and(x : int) = false && flag(x);
  let lazy_or(x : int) = true || flag(x);
end;;
collection P = implement Probe; end;;
";

#[test]
fn equality_unfolds_to_both_containments() {
    let env = with_corpus(PROBE).unwrap_or_else(|(n, e)| panic!("{n}: {e:?}"));
    let p = Value::int;
    let mut ev = Evaluator::new(&env, EvalBudget::default());
    assert_eq!(ev.call("P", "equal", vec![p(3), p(3)]), Ok(Value::Bool(true)));
    assert_eq!(ev.calls["P!is_contained"], 2);
    let mut ev = Evaluator::new(&env, EvalBudget::default());
    assert_eq!(ev.call("P", "equal", vec![p(3), p(4)]), Ok(Value::Bool(false)));
    assert_eq!(ev.calls["P!is_contained"], 1);
    let mut ev = Evaluator::new(&env, EvalBudget::default());
    assert_eq!(ev.call("P", "equal", vec![p(0), p(4)]), Ok(Value::Bool(false)));
    assert_eq!(ev.calls["P!is_contained"], 2);
}

#[test]
fn connectives_short_circuit() {
    let env = with_corpus(PROBE).unwrap_or_else(|(n, e)| panic!("{n}: {e:?}"));
    for m in ["lazy_and", "lazy_or"] {
        let mut ev = Evaluator::new(&env, EvalBudget::default());
        assert!(ev.call("P", m, vec![Value::int(1)]).is_ok());
        assert_eq!(ev.calls.get("P!flag"), None, "{m}");
    }
}

#[test]
fn fuel_runs_out() {
    let env = corpus_env();
    let long = set(&(0..100).collect::<Vec<_>>());
    let r = eval(&env, "IntFiniteParts", "cardinal", vec![long.clone()], EvalBudget { fuel: 50 });
    assert_eq!(r, Err(EvalError::FuelExhausted));
    let r = eval(&env, "IntFiniteParts", "cardinal", vec![long], EvalBudget { fuel: 101 });
    assert_eq!(r, Ok(Value::int(100)));
}

#[test]
fn deep_recursion_is_limited_by_fuel_only() {
    let env = corpus_env();
    let n = 200_000;
    let long = set(&vec![1; n]);
    let r = eval(&env, "IntFiniteParts", "cardinal", vec![long], EvalBudget::default());
    assert_eq!(r, Ok(Value::int(n as i64)));
}

#[test]
fn match_failure_is_reported() {
    let env = with_corpus(
        "species Partial = representation = int;
           let head(l : list(int)) : int = match l with | h :: _ -> h;
         end;;
         collection Q = implement Partial; end;;",
    )
    .unwrap_or_else(|(n, e)| panic!("{n}: {e:?}"));
    assert!(matches!(run(&env, "Q", "head([])"), Err(EvalError::MatchFailure(_))));
    assert_eq!(show(&env, "Q", "head([7; 8])"), "7");
}

fn random_list(rng: &mut ChaCha8Rng, max: usize) -> Vec<i64> {
    let n = rng.random_range(0..=max);
    (0..n).map(|_| rng.random_range(0..3)).collect()
}

#[test]
fn boolean_definitions_agree_with_their_axioms() {
    let env = corpus_env();
    let mut oracle = AxiomOracle::new(&env);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = EvalBudget::default();
    let cases: [(&str, &str, &[&str]); 5] = [
        ("IntSetoid", "equal", &["e", "e"]),
        ("IntSetoid", "different", &["e", "e"]),
        ("IntFiniteParts", "belongs", &["e", "s"]),
        ("IntFiniteParts", "equal", &["s", "s"]),
        ("IntFiniteParts", "different", &["s", "s"]),
    ];
    for (coll, m, shape) in cases {
        for _ in 0..250 {
            let raw: Vec<Value> = shape
                .iter()
                .map(|k| if *k == "e" { Value::int(rng.random_range(0..3)) } else { ints(&random_list(&mut rng, 4)) })
                .collect();
            let wrapped: Vec<Value> = raw
                .iter()
                .zip(shape.iter())
                .map(|(v, k)| Value::opaque(if *k == "e" && coll == "IntFiniteParts" { "IntSetoid" } else { coll }, v.clone()))
                .collect();
            let got = eval(&env, coll, m, wrapped, b).unwrap();
            let want = oracle.apply(coll, m, &raw);
            assert_eq!(got, want, "{coll}!{m}({raw:?})");
        }
    }
}

#[test]
fn release_agrees_with_filter() {
    let env = corpus_env();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let l = random_list(&mut rng, 10);
        let s = rng.random_range(0..3);
        let want: Vec<i64> = l.iter().copied().filter(|&x| x != s).collect();
        let got = eval(&env, "IntFiniteParts", "release", vec![set(&l), elem(s)], EvalBudget::default()).unwrap();
        assert_eq!(got, set(&want));
    }
}

#[test]
fn release_spec_holds_in_evaluation() {
    let env = corpus_env();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let b = EvalBudget::default();
    for _ in 0..500 {
        let l = random_list(&mut rng, 10);
        let (e1, e2) = (rng.random_range(0..3), rng.random_range(0..3));
        let released = eval(&env, "IntFiniteParts", "release", vec![set(&l), elem(e2)], b).unwrap();
        let got = eval(&env, "IntFiniteParts", "belongs", vec![elem(e1), released], b).unwrap();
        let members: std::collections::BTreeSet<i64> = l.iter().copied().collect();
        assert_eq!(got, Value::Bool(e1 != e2 && members.contains(&e1)), "{l:?} {e1} {e2}");
    }
}

fn shared_env() -> &'static Env {
    static ENV: std::sync::OnceLock<Env> = std::sync::OnceLock::new();
    ENV.get_or_init(corpus_env)
}

proptest! {
    #[test]
    fn corpus_functions_terminate(l in proptest::collection::vec(0i64..3, 0..=50), x in 0i64..3) {
        let env = shared_env();
        let b = EvalBudget::default();
        for (m, args) in [
            ("belongs", vec![elem(x), set(&l)]),
            ("cardinal", vec![set(&l)]),
            ("release", vec![set(&l), elem(x)]),
            ("from_list", vec![Value::list(l.iter().map(|&v| elem(v)))]),
            ("equal", vec![set(&l), set(&l)]),
            ("different", vec![set(&l), set(&[])]),
        ] {
            prop_assert!(eval(env, "IntFiniteParts", m, args, b).is_ok(), "{}", m);
        }
    }
}
