//! Parameter substitution on syntax: `A!m` and the type `A` become the
//! argument's name when a parameterized parent is instantiated.

use std::collections::HashMap;

use crate::syntax::ast::*;

pub struct Renaming<'a>(pub &'a HashMap<String, String>);

impl Renaming<'_> {
    fn name(&self, n: &mut String) {
        if let Some(m) = self.0.get(n.as_str()) {
            *n = m.clone();
        }
    }

    pub fn ty(&self, t: &mut TypeExpr) {
        match t {
            TypeExpr::Param(id) => self.name(&mut id.name),
            TypeExpr::List(inner, _) => self.ty(inner),
            TypeExpr::Arrow(args, ret) => {
                args.iter_mut().for_each(|a| self.ty(a));
                self.ty(ret);
            }
            TypeExpr::SelfType(_) | TypeExpr::Bool(_) | TypeExpr::Int(_) => {}
        }
    }

    pub fn expr(&self, e: &mut Expr) {
        match &mut e.kind {
            ExprKind::Var(_) | ExprKind::Bool(_) | ExprKind::Int(_) | ExprKind::Nil => {}
            ExprKind::App { args, .. } => args.iter_mut().for_each(|a| self.expr(a)),
            ExprKind::Qualified { collection, args, .. } => {
                self.name(collection);
                if let Some(args) = args {
                    args.iter_mut().for_each(|a| self.expr(a));
                }
            }
            ExprKind::If(c, a, b) => {
                self.expr(c);
                self.expr(a);
                self.expr(b);
            }
            ExprKind::Match { scrutinee, arms } => {
                self.expr(scrutinee);
                arms.iter_mut().for_each(|arm| self.expr(&mut arm.body));
            }
            ExprKind::LetIn { bound, body, .. } => {
                self.expr(bound);
                self.expr(body);
            }
            ExprKind::Not(a) => self.expr(a),
            ExprKind::And(a, b)
            | ExprKind::Or(a, b)
            | ExprKind::Cons(a, b)
            | ExprKind::Add(a, b)
            | ExprKind::Sub(a, b)
            | ExprKind::Equal(a, b) => {
                self.expr(a);
                self.expr(b);
            }
        }
    }

    pub fn formula(&self, f: &mut Formula) {
        match &mut f.kind {
            FormulaKind::All(_, ty, body) | FormulaKind::Ex(_, ty, body) => {
                self.ty(ty);
                self.formula(body);
            }
            FormulaKind::Not(a) => self.formula(a),
            FormulaKind::And(a, b) | FormulaKind::Or(a, b) | FormulaKind::Implies(a, b) | FormulaKind::Iff(a, b) => {
                self.formula(a);
                self.formula(b);
            }
            FormulaKind::Atom(e) => self.expr(e),
            FormulaKind::Eq(a, b) => {
                self.expr(a);
                self.expr(b);
            }
        }
    }

    pub fn params(&self, ps: &mut [Param]) {
        for p in ps {
            if let Some(t) = &mut p.ty {
                self.ty(t);
            }
        }
    }

    fn justification(&self, j: &mut Justification) {
        if let Justification::By(c) = j {
            for n in c.definitions.iter_mut().chain(c.properties.iter_mut()).chain(c.theorems.iter_mut()) {
                if let Some(q) = &mut n.qualifier {
                    self.name(q);
                }
            }
        }
    }

    pub fn proof(&self, p: &mut Proof) {
        match p {
            Proof::By(j) => self.justification(j),
            Proof::Steps(steps) => {
                for s in steps {
                    for intro in &mut s.intros {
                        match intro {
                            Intro::Assume { ty, .. } => self.ty(ty),
                            Intro::Hypothesis { formula, .. } => self.formula(formula),
                        }
                    }
                    match &mut s.body {
                        StepBody::Prove { goal, proof } => {
                            self.formula(goal);
                            self.proof(proof);
                        }
                        StepBody::Qed(j) => self.justification(j),
                    }
                }
            }
        }
    }
}
