//! From typed trees to kernel formulas, and definitional axioms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::species::typed::*;
use crate::species::Ty;
use crate::syntax::ast::Pattern;

use super::term::{fresh_name, Formula, Sort, Term};
use super::KernelError;

/// How names of a typed tree map to kernel symbols. A tree taken from the
/// interface of parameter `X` sees its own methods as `X!m` and its carrier
/// as `X`.
#[derive(Clone, Debug, Default)]
pub struct View {
    pub qualifier: Option<String>,
}

impl View {
    pub fn own() -> View {
        View { qualifier: None }
    }

    pub fn through(q: &str) -> View {
        View { qualifier: Some(q.to_string()) }
    }

    pub fn sort(&self, ty: &Ty) -> Result<Sort, KernelError> {
        Ok(match ty {
            Ty::SelfTy => Sort::Carrier(self.qualifier.clone().unwrap_or_else(|| "Self".into())),
            Ty::Bool | Ty::Prop => Sort::Bool,
            Ty::Int => Sort::Int,
            Ty::Carrier(n) => Sort::Carrier(n.clone()),
            Ty::List(t) => Sort::list(self.sort(t)?),
            Ty::Fun(..) => return Err(KernelError::Unsupported(format!("function-typed value of type {ty}"))),
            Ty::Var(_) => return Err(KernelError::Unsupported("unresolved type".into())),
        })
    }

    fn symbol(&self, m: &str) -> String {
        match &self.qualifier {
            Some(q) => format!("{q}!{m}"),
            None => m.to_string(),
        }
    }
}

/// One way an expression can evaluate: under `guards`, with `vars`
/// universally bound, it equals `term`.
#[derive(Clone, Debug)]
struct Alt {
    vars: Vec<(String, Sort)>,
    guards: Vec<Formula>,
    term: Term,
}

impl Alt {
    fn plain(term: Term) -> Alt {
        Alt { vars: vec![], guards: vec![], term }
    }
}

/// Shapes of a scrutinee with the arm chosen for each.
struct Case<'a> {
    vars: Vec<(String, Sort)>,
    shape: Term,
    /// Pattern variables to replace in the arm body.
    rename: HashMap<String, Term>,
    body: &'a TExpr,
}

pub struct Translator<'v> {
    view: &'v View,
    /// Names that fresh variables must avoid.
    avoid: BTreeSet<String>,
}

impl<'v> Translator<'v> {
    pub fn new(view: &'v View) -> Translator<'v> {
        Translator { view, avoid: BTreeSet::new() }
    }

    fn fresh(&mut self, base: &str) -> String {
        let n = fresh_name(base, &self.avoid);
        self.avoid.insert(n.clone());
        n
    }

    pub fn formula(&mut self, f: &TFormula) -> Result<Formula, KernelError> {
        Ok(match &f.kind {
            TFormulaKind::All(x, t, b) => {
                self.avoid.insert(x.clone());
                Formula::all(x, self.view.sort(t)?, self.formula(b)?)
            }
            TFormulaKind::Ex(x, t, b) => {
                self.avoid.insert(x.clone());
                Formula::ex(x, self.view.sort(t)?, self.formula(b)?)
            }
            TFormulaKind::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            TFormulaKind::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            TFormulaKind::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            TFormulaKind::Iff(a, b) => Formula::iff(self.formula(a)?, self.formula(b)?),
            TFormulaKind::Not(a) => Formula::not(self.formula(a)?),
            TFormulaKind::Atom(e) => self.bool_expr(e)?,
            TFormulaKind::Eq(a, b) => self.equation(a, b)?,
            TFormulaKind::True => Formula::True,
            TFormulaKind::False => Formula::False,
        })
    }

    fn equation(&mut self, a: &TExpr, b: &TExpr) -> Result<Formula, KernelError> {
        let alts = self.product(&[a, b])?;
        Ok(close_alts(alts, |ts| Formula::Eq(ts[0].clone(), ts[1].clone())))
    }

    /// A boolean expression read as a formula.
    pub fn bool_expr(&mut self, e: &TExpr) -> Result<Formula, KernelError> {
        Ok(match &e.kind {
            TExprKind::Bool(true) => Formula::True,
            TExprKind::Bool(false) => Formula::False,
            TExprKind::And(a, b) => Formula::and(self.bool_expr(a)?, self.bool_expr(b)?),
            TExprKind::Or(a, b) => Formula::or(self.bool_expr(a)?, self.bool_expr(b)?),
            TExprKind::Not(a) => Formula::not(self.bool_expr(a)?),
            TExprKind::Equal(a, b) => self.equation(a, b)?,
            TExprKind::If(c, a, b) => {
                let c = self.bool_expr(c)?;
                Formula::and(
                    Formula::implies(c.clone(), self.bool_expr(a)?),
                    Formula::implies(Formula::not(c), self.bool_expr(b)?),
                )
            }
            TExprKind::Let(x, bound, body) => {
                let alts = self.alts(bound)?;
                let body = self.bool_expr(body)?;
                let mut parts = Vec::new();
                for alt in alts {
                    let inst = body.subst_unchecked(&HashMap::from([(x.clone(), alt.term.clone())]));
                    parts.push(Formula::forall(&alt.vars, Formula::guarded(alt.guards, inst)));
                }
                Formula::conj(parts)
            }
            TExprKind::Match(s, arms) => {
                let salts = self.alts(s)?;
                let mut parts = Vec::new();
                for salt in salts {
                    for case in self.cases(&salt.term, arms)? {
                        let body = self.bool_expr(case.body)?.subst_unchecked(&case.rename);
                        let mut vars = salt.vars.clone();
                        vars.extend(case.vars.clone());
                        let mut guards = salt.guards.clone();
                        if let Some(g) = shape_guard(&salt.term, &case.shape) {
                            guards.push(g);
                        }
                        parts.push(Formula::forall(&vars, Formula::guarded(guards, body)));
                    }
                }
                Formula::conj(parts)
            }
            _ => {
                let alts = self.product(&[e])?;
                close_alts(alts, |ts| Formula::Atom(ts[0].clone()))
            }
        })
    }

    fn product(&mut self, es: &[&TExpr]) -> Result<Vec<(Vec<(String, Sort)>, Vec<Formula>, Vec<Term>)>, KernelError> {
        let mut acc = vec![(vec![], vec![], vec![])];
        for e in es {
            let alts = self.alts(e)?;
            let mut next = Vec::new();
            for (vars, guards, terms) in &acc {
                for a in &alts {
                    let mut v: Vec<(String, Sort)> = vars.clone();
                    v.extend(a.vars.clone());
                    let mut g: Vec<Formula> = guards.clone();
                    g.extend(a.guards.clone());
                    let mut t: Vec<Term> = terms.clone();
                    t.push(a.term.clone());
                    next.push((v, g, t));
                }
            }
            acc = next;
        }
        Ok(acc)
    }

    fn alts(&mut self, e: &TExpr) -> Result<Vec<Alt>, KernelError> {
        let view = self.view;
        let sort = || view.sort(&e.ty);
        Ok(match &e.kind {
            TExprKind::Local(x) => vec![Alt::plain(Term::Var(x.clone(), sort()?))],
            TExprKind::CallMethod(m, args) => {
                let s = sort()?;
                let name = self.view.symbol(m);
                self.apply(&name, args, s)?
            }
            TExprKind::CallQualified(c, m, args) => {
                let s = sort()?;
                self.apply(&format!("{c}!{m}"), args, s)?
            }
            TExprKind::MethodRef(m) | TExprKind::QualifiedRef(_, m) => {
                return Err(KernelError::Unsupported(format!("method `{m}` used as a value")))
            }
            TExprKind::CallLocal(f, _) => return Err(KernelError::Unsupported(format!("call of local function `{f}`"))),
            TExprKind::Bool(b) => vec![Alt::plain(Term::Bool(*b))],
            TExprKind::Int(n) => vec![Alt::plain(Term::Int(n.clone()))],
            TExprKind::Nil => {
                let Sort::List(elem) = sort()? else { unreachable!("nil has a list type") };
                vec![Alt::plain(Term::Nil(*elem))]
            }
            TExprKind::Cons(h, t) => self
                .product(&[h, t])?
                .into_iter()
                .map(|(vars, guards, ts)| Alt { vars, guards, term: Term::cons(ts[0].clone(), ts[1].clone()) })
                .collect(),
            TExprKind::Add(a, b) | TExprKind::Sub(a, b) => {
                let op = if matches!(e.kind, TExprKind::Add(..)) { "+" } else { "-" };
                self.product(&[a, b])?
                    .into_iter()
                    .map(|(vars, guards, ts)| Alt { vars, guards, term: Term::app(op, ts, Sort::Int) })
                    .collect()
            }
            TExprKind::And(..) | TExprKind::Or(..) | TExprKind::Not(_) | TExprKind::Equal(..) => {
                let f = self.bool_expr(e)?;
                vec![
                    Alt { vars: vec![], guards: vec![f.clone()], term: Term::Bool(true) },
                    Alt { vars: vec![], guards: vec![Formula::not(f)], term: Term::Bool(false) },
                ]
            }
            TExprKind::If(c, a, b) => {
                let c = self.bool_expr(c)?;
                let mut out = Vec::new();
                for mut alt in self.alts(a)? {
                    alt.guards.insert(0, c.clone());
                    out.push(alt);
                }
                for mut alt in self.alts(b)? {
                    alt.guards.insert(0, Formula::not(c.clone()));
                    out.push(alt);
                }
                out
            }
            TExprKind::Let(x, bound, body) => {
                let mut out = Vec::new();
                let balts = self.alts(bound)?;
                let bodies = self.alts(body)?;
                for b in &balts {
                    let map = HashMap::from([(x.clone(), b.term.clone())]);
                    for alt in &bodies {
                        let mut vars = b.vars.clone();
                        vars.extend(alt.vars.clone());
                        let mut guards = b.guards.clone();
                        guards.extend(alt.guards.iter().map(|g| g.subst_unchecked(&map)));
                        out.push(Alt { vars, guards, term: alt.term.subst(&map) });
                    }
                }
                out
            }
            TExprKind::Match(s, arms) => {
                let mut out = Vec::new();
                for salt in self.alts(s)? {
                    for case in self.cases(&salt.term, arms)? {
                        for alt in self.alts(case.body)? {
                            let mut vars = salt.vars.clone();
                            vars.extend(case.vars.clone());
                            vars.extend(alt.vars.clone());
                            let mut guards = salt.guards.clone();
                            if let Some(g) = shape_guard(&salt.term, &case.shape) {
                                guards.push(g);
                            }
                            guards.extend(alt.guards.iter().map(|g| g.subst_unchecked(&case.rename)));
                            out.push(Alt { vars, guards, term: alt.term.subst(&case.rename) });
                        }
                    }
                }
                out
            }
        })
    }

    fn apply(&mut self, name: &str, args: &[TExpr], sort: Sort) -> Result<Vec<Alt>, KernelError> {
        let refs: Vec<&TExpr> = args.iter().collect();
        Ok(self
            .product(&refs)?
            .into_iter()
            .map(|(vars, guards, ts)| Alt { vars, guards, term: Term::App(name.to_string(), ts, sort.clone()) })
            .collect())
    }

    /// The arm taken for each possible shape of `scrut`.
    fn cases<'a>(&mut self, scrut: &Term, arms: &'a [TArm]) -> Result<Vec<Case<'a>>, KernelError> {
        let sort = scrut.sort();
        let Sort::List(elem) = &sort else {
            // Only variable or wildcard patterns can match a non-list.
            return Ok(arms
                .iter()
                .find_map(|a| match &a.pattern {
                    Pattern::Wildcard => Some(Case { vars: vec![], shape: scrut.clone(), rename: HashMap::new(), body: &a.body }),
                    Pattern::Var(x) => Some(Case {
                        vars: vec![],
                        shape: scrut.clone(),
                        rename: HashMap::from([(x.clone(), scrut.clone())]),
                        body: &a.body,
                    }),
                    _ => None,
                })
                .into_iter()
                .collect());
        };
        let mut out = Vec::new();
        let nil = Term::Nil((**elem).clone());
        if let Some(arm) = arms.iter().find(|a| matches!(a.pattern, Pattern::Nil | Pattern::Wildcard | Pattern::Var(_))) {
            let mut rename = HashMap::new();
            if let Pattern::Var(x) = &arm.pattern {
                rename.insert(x.clone(), nil.clone());
            }
            out.push(Case { vars: vec![], shape: nil, rename, body: &arm.body });
        }
        if let Some(arm) = arms.iter().find(|a| !matches!(a.pattern, Pattern::Nil)) {
            let (hn, tn) = match &arm.pattern {
                Pattern::Cons(h, t) => (h.name().unwrap_or("h").to_string(), t.name().unwrap_or("t").to_string()),
                _ => ("h".into(), "t".into()),
            };
            let h = self.fresh(&hn);
            let t = self.fresh(&tn);
            let hv = Term::Var(h.clone(), (**elem).clone());
            let tv = Term::Var(t.clone(), sort.clone());
            let shape = Term::cons(hv.clone(), tv.clone());
            let mut rename = HashMap::new();
            match &arm.pattern {
                Pattern::Cons(ph, pt) => {
                    if let Some(n) = ph.name() {
                        rename.insert(n.to_string(), hv.clone());
                    }
                    if let Some(n) = pt.name() {
                        rename.insert(n.to_string(), tv.clone());
                    }
                }
                Pattern::Var(x) => {
                    rename.insert(x.clone(), shape.clone());
                }
                _ => {}
            }
            out.push(Case { vars: vec![(h, (**elem).clone()), (t, sort.clone())], shape, rename, body: &arm.body });
        }
        Ok(out)
    }
}

fn shape_guard(scrut: &Term, shape: &Term) -> Option<Formula> {
    (scrut != shape).then(|| Formula::Eq(scrut.clone(), shape.clone()))
}

fn close_alts(alts: Vec<(Vec<(String, Sort)>, Vec<Formula>, Vec<Term>)>, mk: impl Fn(&[Term]) -> Formula) -> Formula {
    Formula::conj(alts.into_iter().map(|(vars, guards, ts)| Formula::forall(&vars, Formula::guarded(guards, mk(&ts)))).collect())
}

/// Kernel form of a typed formula.
pub fn formula(f: &TFormula, view: &View) -> Result<Formula, KernelError> {
    Translator::new(view).formula(f)
}

/// A definitional axiom and the method it comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct DefAxiom {
    pub source: String,
    pub axiom: Formula,
}

/// Axioms stating a definition: an equivalence for logical and boolean
/// definitions, equations otherwise. A match on a parameter at the top of
/// the body yields one axiom per list shape, and conditionals become
/// guarded equations.
pub fn unfold_definition(name: &str, typed: &TypedSpecies, view: &View) -> Result<Vec<DefAxiom>, KernelError> {
    let sym = view.symbol(name);
    let mk = |axiom| DefAxiom { source: sym.clone(), axiom };
    if let Some(l) = typed.logicals.get(name) {
        let params = sorted(&l.params, view)?;
        let head = Formula::Atom(head_term(&sym, &params, Sort::Bool));
        let mut tr = Translator::new(view);
        tr.avoid.extend(params.iter().map(|p| p.0.clone()));
        let body = tr.formula(&l.body)?;
        return Ok(vec![mk(Formula::forall(&params, Formula::iff(head, body)))]);
    }
    let Some(f) = typed.functions.get(name) else {
        return Err(KernelError::NotDefined(name.to_string()));
    };
    let params = sorted(&f.params, view)?;
    let ret = view.sort(&f.ret)?;
    let mut tr = Translator::new(view);
    tr.avoid.extend(params.iter().map(|p| p.0.clone()));
    let mut out = Vec::new();
    for (vars, args, body, rename) in top_cases(&mut tr, &params, &f.body)? {
        let head = Term::App(sym.clone(), args, ret.clone());
        if ret == Sort::Bool {
            let b = tr.bool_expr(body)?.subst_unchecked(&rename);
            out.push(mk(Formula::forall(&vars, Formula::iff(Formula::Atom(head), b))));
        } else {
            for alt in tr.alts(body)? {
                let mut all = vars.clone();
                all.extend(alt.vars.clone());
                let guards = alt.guards.iter().map(|g| g.subst_unchecked(&rename)).collect();
                let eq = Formula::Eq(head.clone(), alt.term.subst(&rename));
                out.push(mk(Formula::forall(&all, Formula::guarded(guards, eq))));
            }
        }
    }
    Ok(out)
}

type TopCase<'a> = (Vec<(String, Sort)>, Vec<Term>, &'a TExpr, HashMap<String, Term>);

/// Split a body that matches on one of the parameters into one case per
/// shape, replacing the parameter in the head.
fn top_cases<'a>(tr: &mut Translator, params: &[(String, Sort)], body: &'a TExpr) -> Result<Vec<TopCase<'a>>, KernelError> {
    let vars_as_terms = |ps: &[(String, Sort)]| ps.iter().map(|(n, s)| Term::Var(n.clone(), s.clone())).collect::<Vec<_>>();
    if let TExprKind::Match(s, arms) = &body.kind {
        if let TExprKind::Local(p) = &s.kind {
            if let Some(pos) = params.iter().position(|(n, _)| n == p) {
                let scrut = Term::Var(p.clone(), params[pos].1.clone());
                let mut out = Vec::new();
                for case in tr.cases(&scrut, arms)? {
                    let mut vars = params[..pos].to_vec();
                    vars.extend(case.vars.clone());
                    vars.extend(params[pos + 1..].iter().cloned());
                    let mut args = vars_as_terms(params);
                    args[pos] = case.shape.clone();
                    let mut rename = case.rename;
                    rename.insert(p.clone(), case.shape.clone());
                    out.push((vars, args, case.body, rename));
                }
                return Ok(out);
            }
        }
    }
    Ok(vec![(params.to_vec(), vars_as_terms(params), body, HashMap::new())])
}

fn sorted(params: &[(String, Ty)], view: &View) -> Result<Vec<(String, Sort)>, KernelError> {
    params.iter().map(|(n, t)| Ok((n.clone(), view.sort(t)?))).collect()
}

fn head_term(sym: &str, params: &[(String, Sort)], sort: Sort) -> Term {
    Term::App(sym.to_string(), params.iter().map(|(n, s)| Term::Var(n.clone(), s.clone())).collect(), sort)
}

/// Free variables with sorts, for building closures.
pub fn free_vars(f: &Formula) -> BTreeMap<String, Sort> {
    f.free_vars()
}
