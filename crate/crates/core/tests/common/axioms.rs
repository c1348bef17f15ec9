use std::collections::HashMap;

use foclite::eval::{List, Value};
use foclite::kernel::{unfold_definition, Formula, Term, View};
use foclite::species::Env;

/// Evaluates ground kernel terms by rewriting with the definitional axioms
/// of each collection, without using the interpreter.
pub struct AxiomOracle<'e> {
    env: &'e Env,
    axioms: HashMap<(String, String), Vec<Formula>>,
}

impl<'e> AxiomOracle<'e> {
    pub fn new(env: &'e Env) -> Self {
        AxiomOracle { env, axioms: HashMap::new() }
    }

    fn axioms(&mut self, coll: &str, m: &str) -> Vec<Formula> {
        let key = (coll.to_string(), m.to_string());
        if !self.axioms.contains_key(&key) {
            let typed = &self.env.collections[coll].species.typed;
            let ax = unfold_definition(m, typed, &View::own()).unwrap().into_iter().map(|a| a.axiom).collect();
            self.axioms.insert(key.clone(), ax);
        }
        self.axioms[&key].clone()
    }

    pub fn apply(&mut self, coll: &str, sym: &str, args: &[Value]) -> Value {
        let (coll, m) = match sym.split_once('!') {
            Some((c, m)) => (c.to_string(), m.to_string()),
            None => (coll.to_string(), sym.to_string()),
        };
        for ax in self.axioms(&coll, &m) {
            let mut body = &ax;
            while let Formula::All(_, _, b) = body {
                body = b;
            }
            let (guard, eq) = match body {
                Formula::Implies(g, e) => (Some(&**g), &**e),
                e => (None, e),
            };
            let (head, rhs) = match eq {
                Formula::Iff(a, rhs) => match &**a {
                    Formula::Atom(h) => (h, Err(&**rhs)),
                    _ => panic!("{ax}"),
                },
                Formula::Eq(h, t) => (h, Ok(t)),
                _ => panic!("unexpected axiom {ax}"),
            };
            let Term::App(_, pats, _) = head else { panic!("{ax}") };
            let mut b = HashMap::new();
            if !pats.iter().zip(args).all(|(p, v)| matches(p, v, &mut b)) {
                continue;
            }
            if let Some(g) = guard {
                if !self.formula(&coll, g, &b) {
                    continue;
                }
            }
            return match rhs {
                Ok(t) => self.term(&coll, t, &b),
                Err(f) => Value::Bool(self.formula(&coll, f, &b)),
            };
        }
        panic!("no axiom of {coll}!{m} applies")
    }

    fn term(&mut self, coll: &str, t: &Term, b: &HashMap<String, Value>) -> Value {
        match t {
            Term::Var(x, _) => b[x].clone(),
            Term::Int(i) => Value::Int(i.clone()),
            Term::Bool(x) => Value::Bool(*x),
            Term::Nil(_) => Value::list([]),
            Term::Cons(h, tl) => {
                let h = self.term(coll, h, b);
                let Value::List(l) = self.term(coll, tl, b) else { panic!() };
                Value::List(List::cons(h, l))
            }
            Term::App(f, args, _) => {
                let vs: Vec<Value> = args.iter().map(|a| self.term(coll, a, b)).collect();
                match (f.as_str(), &vs[..]) {
                    ("+", [Value::Int(x), Value::Int(y)]) => Value::Int(x + y),
                    ("-", [Value::Int(x), Value::Int(y)]) => Value::Int(x - y),
                    _ => self.apply(coll, f, &vs),
                }
            }
        }
    }

    fn formula(&mut self, coll: &str, f: &Formula, b: &HashMap<String, Value>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(t) => self.term(coll, t, b) == Value::Bool(true),
            Formula::Eq(x, y) => self.term(coll, x, b) == self.term(coll, y, b),
            Formula::Not(a) => !self.formula(coll, a, b),
            Formula::And(x, y) => self.formula(coll, x, b) && self.formula(coll, y, b),
            Formula::Or(x, y) => self.formula(coll, x, b) || self.formula(coll, y, b),
            Formula::Implies(x, y) => !self.formula(coll, x, b) || self.formula(coll, y, b),
            Formula::Iff(x, y) => self.formula(coll, x, b) == self.formula(coll, y, b),
            Formula::All(..) | Formula::Ex(..) => panic!("quantifier in an executable definition: {f}"),
        }
    }
}

fn matches(p: &Term, v: &Value, b: &mut HashMap<String, Value>) -> bool {
    match (p, v) {
        (Term::Var(x, _), v) => {
            b.insert(x.clone(), v.clone());
            true
        }
        (Term::Nil(_), Value::List(l)) => l.is_empty(),
        (Term::Cons(h, t), Value::List(l)) => match l.uncons() {
            Some((hv, tv)) => matches(h, hv, b) && matches(t, &Value::List(tv.clone()), b),
            None => false,
        },
        _ => panic!("pattern {p} against {v}"),
    }
}
