//! Structural termination of recursive definitions and absence of other
//! recursion between methods.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use crate::syntax::ast::*;
use crate::syntax::Span;

use super::error::SpeciesError;
use super::typed::{TExprKind, TypedSpecies};

/// Accepts a `let rec` when every recursive call passes, at the position of
/// the structural parameter, a variable bound as the tail of a `::` pattern
/// in a match on that parameter (or on such a tail).
pub fn check_termination(def: &LetDef) -> Result<(), SpeciesError> {
    let fname = &def.name.name;
    let Some(target) = &def.termination else {
        return Err(SpeciesError::NonStructural {
            function: fname.clone(),
            reason: "no termination clause".into(),
            span: def.name.span,
        });
    };
    let Some(pos) = def.params.iter().position(|p| p.name.name == target.name) else {
        return Err(SpeciesError::NonStructural {
            function: fname.clone(),
            reason: format!("`{}` is not a parameter", target.name),
            span: target.span,
        });
    };
    let mut walker = Walker {
        fname,
        pos,
        arity: def.params.len(),
        origin: HashSet::from([target.name.clone()]),
        smaller: HashSet::new(),
        shadowed: def.params.iter().any(|p| &p.name.name == fname),
    };
    walker.expr(&def.body)
}

struct Walker<'a> {
    fname: &'a str,
    pos: usize,
    arity: usize,
    /// Names denoting the structural parameter itself.
    origin: HashSet<String>,
    /// Names bound to strict sub-terms of it.
    smaller: HashSet<String>,
    /// True when a local hides the function name.
    shadowed: bool,
}

impl Walker<'_> {
    fn fail(&self, reason: impl Into<String>, span: Span) -> Result<(), SpeciesError> {
        Err(SpeciesError::NonStructural { function: self.fname.to_string(), reason: reason.into(), span })
    }

    fn scoped(&mut self, bind: &[&str], f: impl FnOnce(&mut Self) -> Result<(), SpeciesError>) -> Result<(), SpeciesError> {
        let (o, s, sh) = (self.origin.clone(), self.smaller.clone(), self.shadowed);
        for b in bind {
            self.origin.remove(*b);
            self.smaller.remove(*b);
            if *b == self.fname {
                self.shadowed = true;
            }
        }
        let r = f(self);
        self.origin = o;
        self.smaller = s;
        self.shadowed = sh;
        r
    }

    fn expr(&mut self, e: &Expr) -> Result<(), SpeciesError> {
        match &e.kind {
            ExprKind::Var(n) => {
                if n == self.fname && !self.shadowed {
                    return self.fail("the function is used as a value", e.span);
                }
                Ok(())
            }
            ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Nil => Ok(()),
            ExprKind::App { callee, args } => {
                if callee == self.fname && !self.shadowed {
                    if args.len() != self.arity {
                        return self.fail("wrong number of arguments", e.span);
                    }
                    match &args[self.pos].kind {
                        ExprKind::Var(v) if self.smaller.contains(v) => {}
                        _ => {
                            return self.fail(
                                "the structural argument is not a strict sub-pattern of the parameter",
                                args[self.pos].span,
                            )
                        }
                    }
                }
                args.iter().try_for_each(|a| self.expr(a))
            }
            ExprKind::Qualified { args, .. } => args.iter().flatten().try_for_each(|a| self.expr(a)),
            ExprKind::If(a, b, c) => {
                self.expr(a)?;
                self.expr(b)?;
                self.expr(c)
            }
            ExprKind::Match { scrutinee, arms } => {
                self.expr(scrutinee)?;
                let on_structure = match &scrutinee.kind {
                    ExprKind::Var(v) => self.origin.contains(v) || self.smaller.contains(v),
                    _ => false,
                };
                for arm in arms {
                    let (bound, tail): (Vec<&str>, Option<&str>) = match &arm.pattern {
                        Pattern::Cons(h, t) => (h.name().into_iter().chain(t.name()).collect(), t.name()),
                        Pattern::Var(x) => (vec![x.as_str()], None),
                        Pattern::Nil | Pattern::Wildcard => (vec![], None),
                    };
                    let alias = match (&arm.pattern, &scrutinee.kind) {
                        (Pattern::Var(x), ExprKind::Var(v)) if self.origin.contains(v) => Some((x.clone(), true)),
                        (Pattern::Var(x), ExprKind::Var(v)) if self.smaller.contains(v) => Some((x.clone(), false)),
                        _ => None,
                    };
                    self.scoped(&bound, |w| {
                        if on_structure {
                            if let Some(t) = tail {
                                w.smaller.insert(t.to_string());
                            }
                        }
                        if let Some((x, is_origin)) = alias {
                            if is_origin {
                                w.origin.insert(x);
                            } else {
                                w.smaller.insert(x);
                            }
                        }
                        w.expr(&arm.body)
                    })?;
                }
                Ok(())
            }
            ExprKind::LetIn { name, bound, body } => {
                self.expr(bound)?;
                let alias = match &bound.kind {
                    ExprKind::Var(v) if self.smaller.contains(v) => Some(false),
                    ExprKind::Var(v) if self.origin.contains(v) => Some(true),
                    _ => None,
                };
                self.scoped(&[&name.name], |w| {
                    match alias {
                        Some(true) => {
                            w.origin.insert(name.name.clone());
                        }
                        Some(false) => {
                            w.smaller.insert(name.name.clone());
                        }
                        None => {}
                    }
                    w.expr(body)
                })
            }
            ExprKind::And(a, b)
            | ExprKind::Or(a, b)
            | ExprKind::Cons(a, b)
            | ExprKind::Add(a, b)
            | ExprKind::Sub(a, b)
            | ExprKind::Equal(a, b) => {
                self.expr(a)?;
                self.expr(b)
            }
            ExprKind::Not(a) => self.expr(a),
        }
    }
}

/// Reject recursion that the structural check does not cover: calls of a
/// non-recursive definition to itself and cycles through several methods.
pub fn check_call_graph(typed: &TypedSpecies) -> Vec<SpeciesError> {
    let mut graph: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (name, f) in &typed.functions {
        let mut callees = BTreeSet::new();
        f.body.walk(&mut |e| match &e.kind {
            TExprKind::CallMethod(m, _) | TExprKind::MethodRef(m) if typed.functions.contains_key(m) => {
                callees.insert(typed.functions.get_key_value(m).unwrap().0.as_str());
            }
            _ => {}
        });
        graph.insert(name.as_str(), callees);
    }
    let mut errors = Vec::new();
    for (name, callees) in &graph {
        let f = &typed.functions[*name];
        if callees.contains(name) && !f.is_rec {
            errors.push(SpeciesError::NonStructural {
                function: name.to_string(),
                reason: "recursive call in a definition not marked `rec`".into(),
                span: f.span,
            });
        }
    }
    // Cycles of length two or more.
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    let names: Vec<&str> = graph.keys().copied().collect();
    for n in names {
        let mut path = Vec::new();
        if let Some(cycle) = find_cycle(n, &graph, &mut state, &mut path) {
            let f = &typed.functions[cycle[0]];
            errors.push(SpeciesError::NonStructural {
                function: cycle[0].to_string(),
                reason: format!("mutual recursion through {}", cycle.join(" -> ")),
                span: f.span,
            });
            break;
        }
    }
    errors
}

fn find_cycle<'a>(
    n: &'a str,
    graph: &BTreeMap<&'a str, BTreeSet<&'a str>>,
    state: &mut BTreeMap<&'a str, u8>,
    path: &mut Vec<&'a str>,
) -> Option<Vec<&'a str>> {
    match state.get(n) {
        Some(2) => return None,
        Some(1) => {
            let at = path.iter().position(|p| *p == n)?;
            let mut c = path[at..].to_vec();
            c.push(n);
            return Some(c);
        }
        _ => {}
    }
    state.insert(n, 1);
    path.push(n);
    for m in graph.get(n).into_iter().flatten() {
        if *m == n {
            continue;
        }
        if let Some(c) = find_cycle(m, graph, state, path) {
            return Some(c);
        }
    }
    path.pop();
    state.insert(n, 2);
    None
}

/// Matches that cover neither `_`/variable nor both list shapes.
pub fn non_exhaustive_matches(typed: &TypedSpecies) -> Vec<SpeciesError> {
    let mut out = Vec::new();
    let mut names: Vec<&String> = typed.functions.keys().collect();
    names.sort();
    for name in names {
        typed.functions[name].body.walk(&mut |e| {
            if let TExprKind::Match(_, arms) = &e.kind {
                let total = arms.iter().any(|a| matches!(a.pattern, Pattern::Wildcard | Pattern::Var(_)));
                let nil = arms.iter().any(|a| a.pattern == Pattern::Nil);
                let cons = arms.iter().any(|a| matches!(a.pattern, Pattern::Cons(..)));
                if !total && !(nil && cons) {
                    out.push(SpeciesError::NonExhaustiveMatch { function: name.clone(), span: e.span });
                }
            }
        });
    }
    out
}
