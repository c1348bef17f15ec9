//! Preprocessing with definitional facts.
//!
//! A definition `all xs, p(xs) <-> body` whose head arguments are distinct
//! variables is inlined everywhere and then dropped. Other non-recursive
//! definitional facts (pattern heads, unguarded equations) rewrite matching
//! atoms and terms but stay available as facts.

use std::collections::{BTreeMap, HashMap};

use crate::kernel::{Formula, Sort, Term};

const MAX_DEPTH: usize = 16;

#[derive(Clone, Debug)]
enum Rhs {
    Formula(Formula),
    Term(Term),
}

#[derive(Clone, Debug)]
pub struct Rule {
    vars: Vec<String>,
    lhs: Term,
    rhs: Rhs,
    /// Head arguments are exactly the distinct bound variables.
    pub variable_head: bool,
    pub is_iff: bool,
}

fn head_symbol(t: &Term) -> Option<&str> {
    match t {
        Term::App(f, _, _) => Some(f),
        _ => None,
    }
}

fn mentions(f: &Formula, sym: &str) -> bool {
    let mut out = Default::default();
    f.symbols(&mut out);
    out.iter().any(|(s, _): &(String, usize)| s == sym)
}

fn term_mentions(t: &Term, sym: &str) -> bool {
    let mut out = Default::default();
    t.symbols(&mut out);
    out.iter().any(|(s, _): &(String, usize)| s == sym)
}

/// Read a fact as a rewrite rule, if it has the shape of one.
pub fn rule_of(f: &Formula) -> Option<Rule> {
    let mut vars: Vec<(String, Sort)> = Vec::new();
    let mut body = f;
    while let Formula::All(x, s, b) = body {
        if vars.iter().any(|(y, _)| y == x) {
            return None;
        }
        vars.push((x.clone(), s.clone()));
        body = b;
    }
    let (lhs, rhs, is_iff) = match body {
        Formula::Iff(a, b) => match &**a {
            Formula::Atom(t) => (t.clone(), Rhs::Formula((**b).clone()), true),
            _ => return None,
        },
        Formula::Eq(a, b) => (a.clone(), Rhs::Term(b.clone()), false),
        _ => return None,
    };
    let head = head_symbol(&lhs)?;
    let recursive = match &rhs {
        Rhs::Formula(g) => mentions(g, head),
        Rhs::Term(t) => term_mentions(t, head),
    };
    if recursive {
        return None;
    }
    let mut lhs_vars = BTreeMap::new();
    lhs.free_vars(&mut lhs_vars);
    let names: Vec<String> = vars.iter().map(|(x, _)| x.clone()).collect();
    if names.iter().any(|x| !lhs_vars.contains_key(x)) {
        return None;
    }
    let rhs_free = match &rhs {
        Rhs::Formula(g) => g.free_vars(),
        Rhs::Term(t) => {
            let mut m = BTreeMap::new();
            t.free_vars(&mut m);
            m
        }
    };
    if rhs_free.keys().any(|x| !lhs_vars.contains_key(x)) {
        return None;
    }
    let variable_head = match &lhs {
        Term::App(_, args, _) => {
            args.len() == names.len()
                && args.iter().all(|a| matches!(a, Term::Var(x, _) if names.contains(x)))
        }
        _ => false,
    };
    Some(Rule { vars: names, lhs, rhs, variable_head, is_iff })
}

fn match_term(pat: &Term, t: &Term, vars: &[String], sub: &mut HashMap<String, Term>) -> bool {
    match (pat, t) {
        (Term::Var(x, s), _) if vars.contains(x) => {
            if *s != t.sort() {
                return false;
            }
            match sub.get(x) {
                Some(bound) => bound == t,
                None => {
                    sub.insert(x.clone(), t.clone());
                    true
                }
            }
        }
        (Term::App(f, xs, s), Term::App(g, ys, s2)) => {
            f == g && s == s2 && xs.len() == ys.len() && xs.iter().zip(ys).all(|(a, b)| match_term(a, b, vars, sub))
        }
        (Term::Cons(h1, t1), Term::Cons(h2, t2)) => match_term(h1, h2, vars, sub) && match_term(t1, t2, vars, sub),
        _ => pat == t,
    }
}

pub struct Rewriter<'r> {
    rules: &'r [Rule],
}

impl<'r> Rewriter<'r> {
    pub fn new(rules: &'r [Rule]) -> Rewriter<'r> {
        Rewriter { rules }
    }

    pub fn term(&self, t: &Term, depth: usize) -> Term {
        let t = match t {
            Term::App(f, args, s) => Term::App(f.clone(), args.iter().map(|a| self.term(a, depth)).collect(), s.clone()),
            Term::Cons(h, tl) => Term::cons(self.term(h, depth), self.term(tl, depth)),
            _ => t.clone(),
        };
        if depth >= MAX_DEPTH {
            return t;
        }
        for r in self.rules {
            if let Rhs::Term(rhs) = &r.rhs {
                let mut sub = HashMap::new();
                if match_term(&r.lhs, &t, &r.vars, &mut sub) {
                    return self.term(&rhs.subst(&sub), depth + 1);
                }
            }
        }
        t
    }

    pub fn formula(&self, f: &Formula) -> Formula {
        self.formula_at(f, 0)
    }

    fn formula_at(&self, f: &Formula, depth: usize) -> Formula {
        match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(t) => {
                let t = self.term(t, 0);
                if depth < MAX_DEPTH {
                    for r in self.rules {
                        if let Rhs::Formula(rhs) = &r.rhs {
                            let mut sub = HashMap::new();
                            if match_term(&r.lhs, &t, &r.vars, &mut sub) {
                                return self.formula_at(&rhs.subst_unchecked(&sub), depth + 1);
                            }
                        }
                    }
                }
                Formula::Atom(t)
            }
            Formula::Eq(a, b) => Formula::Eq(self.term(a, 0), self.term(b, 0)),
            Formula::Not(a) => Formula::not(self.formula_at(a, depth)),
            Formula::And(a, b) => Formula::and(self.formula_at(a, depth), self.formula_at(b, depth)),
            Formula::Or(a, b) => Formula::or(self.formula_at(a, depth), self.formula_at(b, depth)),
            Formula::Implies(a, b) => Formula::implies(self.formula_at(a, depth), self.formula_at(b, depth)),
            Formula::Iff(a, b) => Formula::iff(self.formula_at(a, depth), self.formula_at(b, depth)),
            Formula::All(x, s, b) => Formula::All(x.clone(), s.clone(), Box::new(self.formula_at(b, depth))),
            Formula::Ex(x, s, b) => Formula::Ex(x.clone(), s.clone(), Box::new(self.formula_at(b, depth))),
        }
    }
}

/// Rewrite a set of facts and a goal with the definitional facts among them.
/// Returns the surviving facts (name, formula) and the rewritten goal.
pub fn preprocess(facts: Vec<(String, Formula, bool)>, goal: Formula) -> (Vec<(String, Formula)>, Formula) {
    let mut facts = facts;
    let mut goal = goal;
    // Inline variable-headed iff definitions one at a time.
    loop {
        let pos = facts.iter().position(|(_, f, def)| *def && rule_of(f).is_some_and(|r| r.variable_head && r.is_iff));
        let Some(pos) = pos else { break };
        let (_, f, _) = facts.remove(pos);
        let rule = [rule_of(&f).expect("checked above")];
        let rw = Rewriter::new(&rule);
        goal = rw.formula(&goal);
        for (_, g, _) in facts.iter_mut() {
            *g = rw.formula(g);
        }
    }
    let rules: Vec<(usize, Rule)> = facts
        .iter()
        .enumerate()
        .filter(|(_, (_, _, def))| *def)
        .filter_map(|(i, (_, f, _))| rule_of(f).map(|r| (i, r)))
        .collect();
    if !rules.is_empty() {
        let all: Vec<Rule> = rules.iter().map(|(_, r)| r.clone()).collect();
        let rw = Rewriter::new(&all);
        goal = rw.formula(&goal);
        for (i, (_, g, _)) in facts.iter_mut().enumerate() {
            if rules.iter().any(|(j, _)| *j == i) {
                continue;
            }
            *g = rw.formula(g);
        }
    }
    (facts.into_iter().map(|(n, f, _)| (n, f)).collect(), goal)
}
