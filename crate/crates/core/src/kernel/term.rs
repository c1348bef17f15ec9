use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;

use super::KernelError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Bool,
    Int,
    /// A carrier; `Self` is the abstract carrier of the current species.
    Carrier(String),
    List(Box<Sort>),
}

impl Sort {
    pub fn list(elem: Sort) -> Sort {
        Sort::List(Box::new(elem))
    }

    pub fn carrier(name: &str) -> Sort {
        Sort::Carrier(name.to_string())
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Bool => write!(f, "bool"),
            Sort::Int => write!(f, "int"),
            Sort::Carrier(n) => write!(f, "{n}"),
            Sort::List(s) => write!(f, "list({s})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String, Sort),
    /// Function symbol, arguments and result sort. Qualified symbols are
    /// named `X!m`; arithmetic uses `+` and `-`.
    App(String, Vec<Term>, Sort),
    /// Empty list with its element sort.
    Nil(Sort),
    Cons(Box<Term>, Box<Term>),
    Int(BigInt),
    Bool(bool),
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var(name.to_string(), sort)
    }

    pub fn app(name: &str, args: Vec<Term>, sort: Sort) -> Term {
        Term::App(name.to_string(), args, sort)
    }

    pub fn cons(h: Term, t: Term) -> Term {
        Term::Cons(Box::new(h), Box::new(t))
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(_, s) | Term::App(_, _, s) => s.clone(),
            Term::Nil(e) => Sort::list(e.clone()),
            Term::Cons(h, _) => Sort::list(h.sort()),
            Term::Int(_) => Sort::Int,
            Term::Bool(_) => Sort::Bool,
        }
    }

    pub fn free_vars(&self, out: &mut BTreeMap<String, Sort>) {
        match self {
            Term::Var(n, s) => {
                out.insert(n.clone(), s.clone());
            }
            Term::App(_, args, _) => args.iter().for_each(|a| a.free_vars(out)),
            Term::Cons(h, t) => {
                h.free_vars(out);
                t.free_vars(out);
            }
            Term::Nil(_) | Term::Int(_) | Term::Bool(_) => {}
        }
    }

    pub fn has_var(&self, name: &str) -> bool {
        match self {
            Term::Var(n, _) => n == name,
            Term::App(_, args, _) => args.iter().any(|a| a.has_var(name)),
            Term::Cons(h, t) => h.has_var(name) || t.has_var(name),
            Term::Nil(_) | Term::Int(_) | Term::Bool(_) => false,
        }
    }

    /// Terms have no binders, so substitution is plain replacement.
    pub fn subst(&self, map: &HashMap<String, Term>) -> Term {
        match self {
            Term::Var(n, _) => map.get(n).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args, s) => Term::App(f.clone(), args.iter().map(|a| a.subst(map)).collect(), s.clone()),
            Term::Cons(h, t) => Term::cons(h.subst(map), t.subst(map)),
            other => other.clone(),
        }
    }

    /// Every function symbol with its arity.
    pub fn symbols(&self, out: &mut BTreeSet<(String, usize)>) {
        match self {
            Term::App(f, args, _) => {
                out.insert((f.clone(), args.len()));
                args.iter().for_each(|a| a.symbols(out));
            }
            Term::Cons(h, t) => {
                h.symbols(out);
                t.symbols(out);
            }
            _ => {}
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n, _) => write!(f, "{n}"),
            Term::App(name, args, _) if args.len() == 2 && (name == "+" || name == "-") => {
                write!(f, "(")?;
                fmt_operand(&args[0], f)?;
                write!(f, " {name} ")?;
                fmt_operand(&args[1], f)?;
                write!(f, ")")
            }
            Term::App(name, args, _) if args.is_empty() => write!(f, "{name}"),
            Term::App(name, args, _) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
            Term::Nil(_) => write!(f, "[]"),
            Term::Cons(h, t) => {
                fmt_operand(h, f)?;
                write!(f, " :: {t}")
            }
            Term::Int(n) => write!(f, "{n}"),
            Term::Bool(b) => write!(f, "{b}"),
        }
    }
}

fn fmt_operand(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Cons(..) => write!(f, "({t})"),
        _ => write!(f, "{t}"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// A bool-sorted term that holds.
    Atom(Term),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    All(String, Sort, Box<Formula>),
    Ex(String, Sort, Box<Formula>),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn all(x: &str, s: Sort, body: Formula) -> Formula {
        Formula::All(x.to_string(), s, Box::new(body))
    }

    pub fn ex(x: &str, s: Sort, body: Formula) -> Formula {
        Formula::Ex(x.to_string(), s, Box::new(body))
    }

    /// Conjunction of a list, `true` when empty.
    pub fn conj(fs: Vec<Formula>) -> Formula {
        let mut it = fs.into_iter().rev();
        match it.next() {
            None => Formula::True,
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    /// `g1 /\ ... /\ gn -> f`, or `f` itself without guards.
    pub fn guarded(guards: Vec<Formula>, f: Formula) -> Formula {
        if guards.is_empty() {
            f
        } else {
            Formula::implies(Formula::conj(guards), f)
        }
    }

    /// Universal closure over the given variables, outermost first.
    pub fn forall(vars: &[(String, Sort)], body: Formula) -> Formula {
        vars.iter().rev().fold(body, |acc, (x, s)| Formula::all(x, s.clone(), acc))
    }

    pub fn free_vars(&self) -> BTreeMap<String, Sort> {
        let mut out = BTreeMap::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeMap<String, Sort>) {
        let term = |t: &Term, bound: &Vec<String>, out: &mut BTreeMap<String, Sort>| {
            let mut fv = BTreeMap::new();
            t.free_vars(&mut fv);
            for (n, s) in fv {
                if !bound.contains(&n) {
                    out.insert(n, s);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(t) => term(t, bound, out),
            Formula::Eq(a, b) => {
                term(a, bound, out);
                term(b, bound, out);
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::All(x, _, b) | Formula::Ex(x, _, b) => {
                bound.push(x.clone());
                b.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every name used, free or bound.
    pub fn names(&self, out: &mut BTreeSet<String>) {
        let term = |t: &Term, out: &mut BTreeSet<String>| {
            let mut fv = BTreeMap::new();
            t.free_vars(&mut fv);
            out.extend(fv.into_keys());
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(t) => term(t, out),
            Formula::Eq(a, b) => {
                term(a, out);
                term(b, out);
            }
            Formula::Not(a) => a.names(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.names(out);
                b.names(out);
            }
            Formula::All(x, _, b) | Formula::Ex(x, _, b) => {
                out.insert(x.clone());
                b.names(out);
            }
        }
    }

    pub fn symbols(&self, out: &mut BTreeSet<(String, usize)>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(t) => t.symbols(out),
            Formula::Eq(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
            Formula::Not(a) | Formula::All(_, _, a) | Formula::Ex(_, _, a) => a.symbols(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
        }
    }

    /// Capture-avoiding substitution of free variables. Sorts must agree.
    pub fn substitute(&self, binding: &HashMap<String, Term>) -> Result<Formula, KernelError> {
        let free = self.free_vars();
        for (x, t) in binding {
            if let Some(s) = free.get(x) {
                if *s != t.sort() {
                    return Err(KernelError::TypeMismatch { var: x.clone(), expected: s.to_string(), found: t.sort().to_string() });
                }
            }
        }
        let map: HashMap<String, Term> = binding.iter().filter(|(x, _)| free.contains_key(*x)).map(|(x, t)| (x.clone(), t.clone())).collect();
        Ok(self.subst_unchecked(&map))
    }

    pub(crate) fn subst_unchecked(&self, map: &HashMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(t) => Formula::Atom(t.subst(map)),
            Formula::Eq(a, b) => Formula::Eq(a.subst(map), b.subst(map)),
            Formula::Not(a) => Formula::not(a.subst_unchecked(map)),
            Formula::And(a, b) => Formula::and(a.subst_unchecked(map), b.subst_unchecked(map)),
            Formula::Or(a, b) => Formula::or(a.subst_unchecked(map), b.subst_unchecked(map)),
            Formula::Implies(a, b) => Formula::implies(a.subst_unchecked(map), b.subst_unchecked(map)),
            Formula::Iff(a, b) => Formula::iff(a.subst_unchecked(map), b.subst_unchecked(map)),
            Formula::All(x, s, body) | Formula::Ex(x, s, body) => {
                let is_all = matches!(self, Formula::All(..));
                let mut inner: HashMap<String, Term> = map.clone();
                inner.remove(x);
                let body_free = body.free_vars();
                inner.retain(|k, _| body_free.contains_key(k));
                let captures = inner.values().any(|t| t.has_var(x));
                let (x2, body2) = if captures {
                    let mut avoid = BTreeSet::new();
                    body.names(&mut avoid);
                    for t in inner.values() {
                        let mut fv = BTreeMap::new();
                        t.free_vars(&mut fv);
                        avoid.extend(fv.into_keys());
                    }
                    let fresh = fresh_name(x, &avoid);
                    let renamed = body.subst_unchecked(&HashMap::from([(x.clone(), Term::Var(fresh.clone(), s.clone()))]));
                    (fresh, renamed)
                } else {
                    (x.clone(), (**body).clone())
                };
                let b = body2.subst_unchecked(&inner);
                if is_all {
                    Formula::All(x2, s.clone(), Box::new(b))
                } else {
                    Formula::Ex(x2, s.clone(), Box::new(b))
                }
            }
        }
    }

    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

/// `base`, or `base_1`, `base_2`... the first one not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    let mut i = 1;
    while avoid.contains(&name) {
        name = format!("{base}_{i}");
        i += 1;
    }
    name
}

fn term_alpha(a: &Term, b: &Term, la: &[String], lb: &[String]) -> bool {
    match (a, b) {
        (Term::Var(x, s1), Term::Var(y, s2)) => {
            let ix = la.iter().rposition(|n| n == x);
            let iy = lb.iter().rposition(|n| n == y);
            s1 == s2
                && match (ix, iy) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
        }
        (Term::App(f, xs, s1), Term::App(g, ys, s2)) => {
            f == g && s1 == s2 && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| term_alpha(x, y, la, lb))
        }
        (Term::Cons(h1, t1), Term::Cons(h2, t2)) => term_alpha(h1, h2, la, lb) && term_alpha(t1, t2, la, lb),
        _ => a == b,
    }
}

fn alpha(a: &Formula, b: &Formula, la: &mut Vec<String>, lb: &mut Vec<String>) -> bool {
    match (a, b) {
        (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
        (Formula::Atom(x), Formula::Atom(y)) => term_alpha(x, y, la, lb),
        (Formula::Eq(x1, y1), Formula::Eq(x2, y2)) => term_alpha(x1, x2, la, lb) && term_alpha(y1, y2, la, lb),
        (Formula::Not(x), Formula::Not(y)) => alpha(x, y, la, lb),
        (Formula::And(x1, y1), Formula::And(x2, y2))
        | (Formula::Or(x1, y1), Formula::Or(x2, y2))
        | (Formula::Implies(x1, y1), Formula::Implies(x2, y2))
        | (Formula::Iff(x1, y1), Formula::Iff(x2, y2)) => alpha(x1, x2, la, lb) && alpha(y1, y2, la, lb),
        (Formula::All(x, s1, b1), Formula::All(y, s2, b2)) | (Formula::Ex(x, s1, b1), Formula::Ex(y, s2, b2)) => {
            if s1 != s2 {
                return false;
            }
            la.push(x.clone());
            lb.push(y.clone());
            let r = alpha(b1, b2, la, lb);
            la.pop();
            lb.pop();
            r
        }
        _ => false,
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::All(..) | Formula::Ex(..) => 0,
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(..) => 5,
        _ => 6,
    }
}

fn fmt_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        write!(out, "(")?;
        fmt_formula(f, out)?;
        write!(out, ")")
    } else {
        fmt_formula(f, out)
    }
}

fn fmt_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::True => write!(out, "true"),
        Formula::False => write!(out, "false"),
        Formula::Atom(t) => write!(out, "{t}"),
        Formula::Eq(a, b) => write!(out, "{a} = {b}"),
        Formula::Not(a) => {
            write!(out, "not ")?;
            fmt_at(a, 5, out)
        }
        Formula::And(a, b) => {
            fmt_at(a, 5, out)?;
            write!(out, " /\\ ")?;
            fmt_at(b, 4, out)
        }
        Formula::Or(a, b) => {
            fmt_at(a, 4, out)?;
            write!(out, " \\/ ")?;
            fmt_at(b, 3, out)
        }
        Formula::Implies(a, b) => {
            fmt_at(a, 3, out)?;
            write!(out, " -> ")?;
            fmt_at(b, 2, out)
        }
        Formula::Iff(a, b) => {
            fmt_at(a, 2, out)?;
            write!(out, " <-> ")?;
            fmt_at(b, 2, out)
        }
        Formula::All(x, s, b) => {
            write!(out, "all {x} : {s}, ")?;
            fmt_formula(b, out)
        }
        Formula::Ex(x, s, b) => {
            write!(out, "ex {x} : {s}, ")?;
            fmt_formula(b, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, f)
    }
}
