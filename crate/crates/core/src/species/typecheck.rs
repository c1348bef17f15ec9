use std::collections::{HashMap, HashSet};

use crate::syntax::ast::*;
use crate::syntax::Span;

use super::env::Env;
use super::error::SpeciesError;
use super::flat::{Carrier, EntryKind, FlatSpecies};
use super::typed::*;
use super::types::{elaborate_type, Ty};

/// Unification state for one species.
struct Checker<'e> {
    env: &'e Env,
    flat: &'e FlatSpecies,
    self_ty: Ty,
    carriers: HashSet<String>,
    subst: Vec<Option<Ty>>,
    methods: HashMap<String, Ty>,
    permissive: bool,
    errors: Vec<SpeciesError>,
}

type Locals = Vec<(String, Ty)>;

fn lookup<'a>(locals: &'a Locals, name: &str) -> Option<&'a Ty> {
    locals.iter().rev().find(|(n, _)| n == name).map(|(_, t)| t)
}

/// Typecheck every body, formula and local proof of a flattened species.
pub fn typecheck(flat: &FlatSpecies, env: &Env) -> Result<TypedSpecies, Vec<SpeciesError>> {
    let mut c = Checker::new(flat, env, false);
    let typed = c.species();
    if c.errors.is_empty() {
        Ok(typed)
    } else {
        Err(c.errors)
    }
}

/// Typecheck a ground expression against the methods of a collection.
/// Carriers of collections are allowed to unify with their representation,
/// so literals can be passed where elements are expected.
pub fn typecheck_expr(expr: &Expr, collection: &str, env: &Env) -> Result<TExpr, Vec<SpeciesError>> {
    let Some(coll) = env.collections.get(collection) else {
        return Err(vec![SpeciesError::UnknownCollection { name: collection.to_string(), span: expr.span }]);
    };
    let mut c = Checker::new(&coll.species.flat, env, true);
    c.self_ty = Ty::Carrier(collection.to_string());
    c.init_methods();
    let mut te = c.expr(expr, &mut Vec::new());
    c.zonk_expr(&mut te);
    if c.errors.is_empty() {
        Ok(te)
    } else {
        Err(c.errors)
    }
}

impl<'e> Checker<'e> {
    fn new(flat: &'e FlatSpecies, env: &'e Env, permissive: bool) -> Checker<'e> {
        let mut carriers: HashSet<String> = env.collection_names();
        carriers.extend(flat.params.iter().map(|p| p.name.clone()));
        let mut c = Checker {
            env,
            flat,
            self_ty: Ty::SelfTy,
            carriers,
            subst: Vec::new(),
            methods: HashMap::new(),
            permissive,
            errors: Vec::new(),
        };
        if let Carrier::Defined { ty, .. } = &flat.carrier {
            if let Some(t) = c.elaborate(ty) {
                c.self_ty = t;
            }
        }
        c
    }

    fn fresh(&mut self) -> Ty {
        self.subst.push(None);
        Ty::Var(self.subst.len() as u32 - 1)
    }

    fn elaborate(&mut self, t: &TypeExpr) -> Option<Ty> {
        let carriers = &self.carriers;
        match elaborate_type(t, &|n| carriers.contains(n)) {
            Ok(ty) => Some(ty.replace_self(&self.self_ty)),
            Err((name, span)) => {
                self.errors.push(SpeciesError::UnboundName { name, span });
                None
            }
        }
    }

    fn elaborate_or_fresh(&mut self, t: &TypeExpr) -> Ty {
        match self.elaborate(t) {
            Some(t) => t,
            None => self.fresh(),
        }
    }

    fn shallow(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Var(v) = t {
            match &self.subst[v as usize] {
                Some(b) => t = b.clone(),
                None => break,
            }
        }
        t
    }

    fn resolve(&self, t: &Ty) -> Ty {
        t.map(&mut |x| match x {
            Ty::Var(v) => self.subst[*v as usize].as_ref().map(|b| self.resolve(b)),
            _ => None,
        })
    }

    fn occurs(&self, v: u32, t: &Ty) -> bool {
        match self.shallow(t) {
            Ty::Var(w) => v == w,
            Ty::List(inner) => self.occurs(v, &inner),
            Ty::Fun(args, ret) => args.iter().any(|a| self.occurs(v, a)) || self.occurs(v, &ret),
            _ => false,
        }
    }

    fn collection_rep(&self, name: &str) -> Option<Ty> {
        self.env.collections.get(name).map(|c| c.carrier.clone())
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (Ty::Var(x), Ty::Var(y)) if x == y => true,
            (Ty::Var(x), t) | (t, Ty::Var(x)) => {
                if self.occurs(*x, t) {
                    return false;
                }
                self.subst[*x as usize] = Some(t.clone());
                true
            }
            (Ty::List(x), Ty::List(y)) => self.unify(x, y),
            (Ty::Fun(a1, r1), Ty::Fun(a2, r2)) => {
                a1.len() == a2.len()
                    && a1.clone().iter().zip(a2.clone().iter()).all(|(x, y)| self.unify(x, y))
                    && self.unify(r1, r2)
            }
            (x, y) if x == y => true,
            (Ty::Carrier(c), t) | (t, Ty::Carrier(c)) if self.permissive => {
                let Some(rep) = self.collection_rep(c) else {
                    return false;
                };
                let t = t.clone();
                self.unify(&rep, &t)
            }
            _ => false,
        }
    }

    fn expect(&mut self, expected: &Ty, found: &Ty, span: Span) {
        if !self.unify(expected, found) {
            self.errors.push(SpeciesError::TypeError {
                expected: self.resolve(expected).to_string(),
                found: self.resolve(found).to_string(),
                span,
            });
        }
    }

    fn init_methods(&mut self) {
        for e in &self.flat.entries {
            let ty = match (&e.kind, &e.ty) {
                (EntryKind::Statement(_), _) => continue,
                (_, Some(t)) => t.replace_self(&self.self_ty),
                (EntryKind::Function(Some(def)), None) => {
                    let args = def.params.iter().map(|_| self.fresh()).collect();
                    let ret = self.fresh();
                    Ty::fun(args, ret)
                }
                (EntryKind::Logical(def), None) => {
                    let args = def.params.iter().map(|_| self.fresh()).collect();
                    Ty::fun(args, Ty::Prop)
                }
                (EntryKind::Function(None), None) => self.fresh(),
            };
            self.methods.insert(e.name.clone(), ty);
        }
    }

    /// Bind formal parameters against a method type.
    fn bind_params(&mut self, name: &str, params: &[Param], ty: &Ty, ret_is_prop: bool, span: Span) -> (Locals, Ty) {
        let ty = self.shallow(ty);
        let (args, ret) = match &ty {
            Ty::Fun(args, ret) if args.len() == params.len() => (args.clone(), (**ret).clone()),
            t if params.is_empty() && !matches!(t, Ty::Fun(..)) => (vec![], t.clone()),
            _ => {
                self.errors.push(SpeciesError::TypeError {
                    expected: self.resolve(&ty).to_string(),
                    found: format!("a definition of `{name}` with {} parameter(s)", params.len()),
                    span,
                });
                let args = params.iter().map(|_| self.fresh()).collect();
                let ret = if ret_is_prop { Ty::Prop } else { self.fresh() };
                (args, ret)
            }
        };
        let mut locals = Vec::new();
        for (p, a) in params.iter().zip(args) {
            if let Some(t) = &p.ty {
                let t = self.elaborate_or_fresh(t);
                self.expect(&t, &a, p.name.span);
            }
            locals.push((p.name.name.clone(), a));
        }
        (locals, ret)
    }

    fn species(&mut self) -> TypedSpecies {
        self.init_methods();
        let flat = self.flat;
        let mut out = TypedSpecies {
            name: flat.name.clone(),
            carrier: matches!(flat.carrier, Carrier::Defined { .. }).then(|| self.self_ty.clone()),
            ..TypedSpecies::default()
        };
        for e in &flat.entries {
            if let EntryKind::Function(Some(def)) = &e.kind {
                let ty = self.methods[&e.name].clone();
                let (mut locals, ret) = self.bind_params(&e.name, &def.params, &ty, false, e.span);
                if let Some(r) = &def.ret {
                    let r = self.elaborate_or_fresh(r);
                    self.expect(&r, &ret, def.body.span);
                }
                let params = locals.clone();
                let body = self.expr(&def.body, &mut locals);
                self.expect(&ret, &body.ty, def.body.span);
                out.functions.insert(
                    e.name.clone(),
                    TFunction {
                        params,
                        ret,
                        body,
                        is_rec: def.is_rec,
                        termination: def.termination.as_ref().map(|t| t.name.clone()),
                        span: e.span,
                    },
                );
            }
        }
        for e in &flat.entries {
            if let EntryKind::Logical(def) = &e.kind {
                let ty = self.methods[&e.name].clone();
                let (mut locals, _) = self.bind_params(&e.name, &def.params, &ty, true, e.span);
                let params = locals.clone();
                let body = self.formula(&def.body, &mut locals);
                out.logicals.insert(e.name.clone(), TLogical { params, body });
            }
        }
        for e in &flat.entries {
            if let EntryKind::Statement(st) = &e.kind {
                let formula = self.formula(&st.formula, &mut Vec::new());
                let proof = st
                    .proof
                    .as_ref()
                    .filter(|p| p.origin == flat.name)
                    .map(|p| self.proof(&p.proof, &mut Vec::new()));
                out.statements.insert(e.name.clone(), TStatement { formula, proof });
            }
        }

        // Resolve all inference variables.
        let names: Vec<String> = self.methods.keys().cloned().collect();
        for n in names {
            let t = self.resolve(&self.methods[&n]);
            if t.has_vars() {
                let span = flat.get(&n).map(|e| e.span).unwrap_or_default();
                self.errors.push(SpeciesError::AmbiguousType { what: format!("`{n}` ({t})"), span });
            }
            out.types.insert(n, t);
        }
        if !self.errors.is_empty() {
            return out;
        }
        let mut functions = std::mem::take(&mut out.functions);
        for f in functions.values_mut() {
            for (_, t) in &mut f.params {
                *t = self.resolve(t);
            }
            f.ret = self.resolve(&f.ret);
            self.zonk_expr(&mut f.body);
        }
        out.functions = functions;
        let mut logicals = std::mem::take(&mut out.logicals);
        for l in logicals.values_mut() {
            for (_, t) in &mut l.params {
                *t = self.resolve(t);
            }
            self.zonk_formula(&mut l.body);
        }
        out.logicals = logicals;
        let mut statements = std::mem::take(&mut out.statements);
        for s in statements.values_mut() {
            self.zonk_formula(&mut s.formula);
            if let Some(p) = &mut s.proof {
                self.zonk_proof(p);
            }
        }
        out.statements = statements;
        out
    }

    fn method_type(&self, name: &str) -> Option<Ty> {
        self.methods.get(name).cloned()
    }

    /// Type of `X!m` seen from here: `Self` of `X` becomes the carrier `X`.
    fn qualified_type(&mut self, coll: &str, method: &str, span: Span) -> Option<Ty> {
        let target = if let Some(p) = self.flat.param(coll) {
            self.env.species.get(&p.interface).map(|s| &s.flat)
        } else {
            self.env.collections.get(coll).map(|c| &c.species.flat)
        };
        let Some(target) = target else {
            self.errors.push(SpeciesError::UnknownCollection { name: coll.to_string(), span });
            return None;
        };
        match target.get(method) {
            Some(e) if !e.is_statement() => match &e.ty {
                Some(t) => Some(t.replace_self(&Ty::Carrier(coll.to_string()))),
                None => {
                    self.errors.push(SpeciesError::AmbiguousType { what: format!("`{coll}!{method}`"), span });
                    None
                }
            },
            _ => {
                self.errors.push(SpeciesError::UnboundName { name: format!("{coll}!{method}"), span });
                None
            }
        }
    }

    fn call_args(&mut self, what: &str, fty: &Ty, args: &[Expr], locals: &mut Locals, span: Span) -> (Vec<TExpr>, Ty) {
        let targs: Vec<TExpr> = args.iter().map(|a| self.expr(a, locals)).collect();
        let fty = self.shallow(fty);
        match &fty {
            Ty::Fun(params, ret) if params.len() == targs.len() => {
                for (p, a) in params.iter().zip(&targs) {
                    self.expect(p, &a.ty, a.span);
                }
                (targs, (**ret).clone())
            }
            Ty::Var(_) => {
                let ret = self.fresh();
                let want = Ty::Fun(targs.iter().map(|a| a.ty.clone()).collect(), Box::new(ret.clone()));
                self.expect(&want, &fty, span);
                (targs, ret)
            }
            _ => {
                self.errors.push(SpeciesError::TypeError {
                    expected: format!("`{what}` : {}", self.resolve(&fty)),
                    found: format!("a call with {} argument(s)", targs.len()),
                    span,
                });
                let ret = self.fresh();
                (targs, ret)
            }
        }
    }

    fn expr(&mut self, e: &Expr, locals: &mut Locals) -> TExpr {
        let span = e.span;
        let (kind, ty) = match &e.kind {
            ExprKind::Var(name) => {
                if let Some(t) = lookup(locals, name) {
                    (TExprKind::Local(name.clone()), t.clone())
                } else if let Some(t) = self.method_type(name) {
                    match self.shallow(&t) {
                        Ty::Fun(..) => (TExprKind::MethodRef(name.clone()), t),
                        _ => (TExprKind::CallMethod(name.clone(), vec![]), t),
                    }
                } else {
                    self.errors.push(SpeciesError::UnboundName { name: name.clone(), span });
                    (TExprKind::Local(name.clone()), self.fresh())
                }
            }
            ExprKind::Bool(b) => (TExprKind::Bool(*b), Ty::Bool),
            ExprKind::Int(n) => (TExprKind::Int(n.clone()), Ty::Int),
            ExprKind::App { callee, args } => {
                if let Some(t) = lookup(locals, callee).cloned() {
                    let (args, ret) = self.call_args(callee, &t, args, locals, span);
                    (TExprKind::CallLocal(callee.clone(), args), ret)
                } else if let Some(t) = self.method_type(callee) {
                    let (args, ret) = self.call_args(callee, &t, args, locals, span);
                    (TExprKind::CallMethod(callee.clone(), args), ret)
                } else {
                    self.errors.push(SpeciesError::UnboundName { name: callee.clone(), span });
                    args.iter().for_each(|a| drop(self.expr(a, locals)));
                    (TExprKind::Bool(false), self.fresh())
                }
            }
            ExprKind::Qualified { collection, method, args } => {
                let fty = self.qualified_type(collection, method, span);
                let what = format!("{collection}!{method}");
                match (fty, args) {
                    (None, _) => (TExprKind::Bool(false), self.fresh()),
                    (Some(t), None) => match t {
                        Ty::Fun(..) => (TExprKind::QualifiedRef(collection.clone(), method.clone()), t),
                        _ => (TExprKind::CallQualified(collection.clone(), method.clone(), vec![]), t),
                    },
                    (Some(t), Some(args)) => {
                        let (args, ret) = self.call_args(&what, &t, args, locals, span);
                        (TExprKind::CallQualified(collection.clone(), method.clone(), args), ret)
                    }
                }
            }
            ExprKind::If(c, a, b) => {
                let c = self.expr(c, locals);
                self.expect(&Ty::Bool, &c.ty, c.span);
                let a = self.expr(a, locals);
                let b = self.expr(b, locals);
                self.expect(&a.ty, &b.ty, b.span);
                let ty = a.ty.clone();
                (TExprKind::If(Box::new(c), Box::new(a), Box::new(b)), ty)
            }
            ExprKind::Match { scrutinee, arms } => {
                let s = self.expr(scrutinee, locals);
                let result = self.fresh();
                let mut tarms = Vec::new();
                for arm in arms {
                    let mark = locals.len();
                    match &arm.pattern {
                        Pattern::Nil | Pattern::Cons(..) => {
                            let elem = self.fresh();
                            self.expect(&Ty::list(elem.clone()), &s.ty, arm.span);
                            if let Pattern::Cons(h, t) = &arm.pattern {
                                if let Some(h) = h.name() {
                                    locals.push((h.to_string(), elem.clone()));
                                }
                                if let Some(t) = t.name() {
                                    locals.push((t.to_string(), Ty::list(elem)));
                                }
                            }
                        }
                        Pattern::Var(x) => locals.push((x.clone(), s.ty.clone())),
                        Pattern::Wildcard => {}
                    }
                    let body = self.expr(&arm.body, locals);
                    locals.truncate(mark);
                    self.expect(&result, &body.ty, body.span);
                    tarms.push(TArm { pattern: arm.pattern.clone(), body });
                }
                (TExprKind::Match(Box::new(s), tarms), result)
            }
            ExprKind::LetIn { name, bound, body } => {
                let b = self.expr(bound, locals);
                locals.push((name.name.clone(), b.ty.clone()));
                let body = self.expr(body, locals);
                locals.pop();
                let ty = body.ty.clone();
                (TExprKind::Let(name.name.clone(), Box::new(b), Box::new(body)), ty)
            }
            ExprKind::And(a, b) | ExprKind::Or(a, b) => {
                let a = self.expr(a, locals);
                let b = self.expr(b, locals);
                self.expect(&Ty::Bool, &a.ty, a.span);
                self.expect(&Ty::Bool, &b.ty, b.span);
                let k = if matches!(e.kind, ExprKind::And(..)) {
                    TExprKind::And(Box::new(a), Box::new(b))
                } else {
                    TExprKind::Or(Box::new(a), Box::new(b))
                };
                (k, Ty::Bool)
            }
            ExprKind::Not(a) => {
                let a = self.expr(a, locals);
                self.expect(&Ty::Bool, &a.ty, a.span);
                (TExprKind::Not(Box::new(a)), Ty::Bool)
            }
            ExprKind::Nil => {
                let elem = self.fresh();
                (TExprKind::Nil, Ty::list(elem))
            }
            ExprKind::Cons(h, t) => {
                let h = self.expr(h, locals);
                let t = self.expr(t, locals);
                self.expect(&Ty::list(h.ty.clone()), &t.ty, t.span);
                let ty = t.ty.clone();
                (TExprKind::Cons(Box::new(h), Box::new(t)), ty)
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                let a = self.expr(a, locals);
                let b = self.expr(b, locals);
                self.expect(&Ty::Int, &a.ty, a.span);
                self.expect(&Ty::Int, &b.ty, b.span);
                let k = if matches!(e.kind, ExprKind::Add(..)) {
                    TExprKind::Add(Box::new(a), Box::new(b))
                } else {
                    TExprKind::Sub(Box::new(a), Box::new(b))
                };
                (k, Ty::Int)
            }
            ExprKind::Equal(a, b) => {
                let a = self.expr(a, locals);
                let b = self.expr(b, locals);
                self.expect(&a.ty, &b.ty, b.span);
                self.no_prop(&a);
                (TExprKind::Equal(Box::new(a), Box::new(b)), Ty::Bool)
            }
        };
        TExpr::new(kind, ty, span)
    }

    fn no_prop(&mut self, e: &TExpr) {
        if self.shallow(&e.ty) == Ty::Prop {
            self.errors.push(SpeciesError::TypeError {
                expected: "a value".into(),
                found: "prop".into(),
                span: e.span,
            });
        }
    }

    fn formula(&mut self, f: &Formula, locals: &mut Locals) -> TFormula {
        let span = f.span;
        let kind = match &f.kind {
            FormulaKind::All(names, ty, body) | FormulaKind::Ex(names, ty, body) => {
                let is_all = matches!(f.kind, FormulaKind::All(..));
                let t = self.elaborate_or_fresh(ty);
                let mark = locals.len();
                for n in names {
                    locals.push((n.name.clone(), t.clone()));
                }
                let mut out = self.formula(body, locals);
                locals.truncate(mark);
                for n in names.iter().rev() {
                    let k = if is_all {
                        TFormulaKind::All(n.name.clone(), t.clone(), Box::new(out))
                    } else {
                        TFormulaKind::Ex(n.name.clone(), t.clone(), Box::new(out))
                    };
                    out = TFormula::new(k, span);
                }
                return out;
            }
            FormulaKind::And(a, b) => TFormulaKind::And(Box::new(self.formula(a, locals)), Box::new(self.formula(b, locals))),
            FormulaKind::Or(a, b) => TFormulaKind::Or(Box::new(self.formula(a, locals)), Box::new(self.formula(b, locals))),
            FormulaKind::Implies(a, b) => {
                TFormulaKind::Implies(Box::new(self.formula(a, locals)), Box::new(self.formula(b, locals)))
            }
            FormulaKind::Iff(a, b) => TFormulaKind::Iff(Box::new(self.formula(a, locals)), Box::new(self.formula(b, locals))),
            FormulaKind::Not(a) => TFormulaKind::Not(Box::new(self.formula(a, locals))),
            FormulaKind::Atom(Expr { kind: ExprKind::Bool(b), .. }) => {
                if *b {
                    TFormulaKind::True
                } else {
                    TFormulaKind::False
                }
            }
            FormulaKind::Atom(e) => {
                let te = self.expr(e, locals);
                match self.shallow(&te.ty) {
                    Ty::Bool | Ty::Prop => {}
                    Ty::Var(_) => self.expect(&Ty::Bool, &te.ty, te.span),
                    other => self.errors.push(SpeciesError::TypeError {
                        expected: "bool".into(),
                        found: self.resolve(&other).to_string(),
                        span: te.span,
                    }),
                }
                TFormulaKind::Atom(te)
            }
            FormulaKind::Eq(a, b) => {
                let a = self.expr(a, locals);
                let b = self.expr(b, locals);
                self.expect(&a.ty, &b.ty, b.span);
                self.no_prop(&a);
                TFormulaKind::Eq(a, b)
            }
        };
        TFormula::new(kind, span)
    }

    fn proof(&mut self, p: &Proof, locals: &mut Locals) -> TProof {
        match p {
            Proof::By(j) => TProof::By(j.clone()),
            Proof::Steps(steps) => TProof::Steps(steps.iter().map(|s| self.step(s, locals)).collect()),
        }
    }

    fn step(&mut self, s: &ProofStep, locals: &mut Locals) -> TStep {
        let mark = locals.len();
        let mut intros = Vec::new();
        for i in &s.intros {
            match i {
                Intro::Assume { names, ty } => {
                    let t = self.elaborate_or_fresh(ty);
                    for n in names {
                        locals.push((n.name.clone(), t.clone()));
                        intros.push(TIntro::Assume(n.name.clone(), t.clone()));
                    }
                }
                Intro::Hypothesis { name, formula } => {
                    let f = self.formula(formula, locals);
                    intros.push(TIntro::Hyp(name.name.clone(), f));
                }
            }
        }
        let body = match &s.body {
            StepBody::Prove { goal, proof } => {
                let goal = self.formula(goal, locals);
                let proof = self.proof(proof, locals);
                TStepBody::Prove { goal, proof }
            }
            StepBody::Qed(j) => TStepBody::Qed(j.clone()),
        };
        locals.truncate(mark);
        TStep { label: s.label.clone(), intros, body, span: s.span }
    }

    fn zonk_ty(&mut self, t: &mut Ty, span: Span) {
        *t = self.resolve(t);
        if t.has_vars() {
            self.errors.push(SpeciesError::AmbiguousType { what: format!("an expression of type {t}"), span });
        }
    }

    fn zonk_expr(&mut self, e: &mut TExpr) {
        let span = e.span;
        self.zonk_ty(&mut e.ty, span);
        use TExprKind::*;
        match &mut e.kind {
            Local(_) | MethodRef(_) | QualifiedRef(..) | Nil | Bool(_) | Int(_) => {}
            CallMethod(_, a) | CallQualified(_, _, a) | CallLocal(_, a) => a.iter_mut().for_each(|x| self.zonk_expr(x)),
            If(a, b, c) => {
                self.zonk_expr(a);
                self.zonk_expr(b);
                self.zonk_expr(c);
            }
            Match(s, arms) => {
                self.zonk_expr(s);
                arms.iter_mut().for_each(|a| self.zonk_expr(&mut a.body));
            }
            Let(_, a, b) | And(a, b) | Or(a, b) | Cons(a, b) | Add(a, b) | Sub(a, b) | Equal(a, b) => {
                self.zonk_expr(a);
                self.zonk_expr(b);
            }
            Not(a) => self.zonk_expr(a),
        }
    }

    fn zonk_formula(&mut self, f: &mut TFormula) {
        let span = f.span;
        match &mut f.kind {
            TFormulaKind::All(_, t, b) | TFormulaKind::Ex(_, t, b) => {
                self.zonk_ty(t, span);
                self.zonk_formula(b);
            }
            TFormulaKind::And(a, b) | TFormulaKind::Or(a, b) | TFormulaKind::Implies(a, b) | TFormulaKind::Iff(a, b) => {
                self.zonk_formula(a);
                self.zonk_formula(b);
            }
            TFormulaKind::Not(a) => self.zonk_formula(a),
            TFormulaKind::Atom(e) => self.zonk_expr(e),
            TFormulaKind::Eq(a, b) => {
                self.zonk_expr(a);
                self.zonk_expr(b);
            }
            TFormulaKind::True | TFormulaKind::False => {}
        }
    }

    fn zonk_proof(&mut self, p: &mut TProof) {
        if let TProof::Steps(steps) = p {
            for s in steps {
                for i in &mut s.intros {
                    match i {
                        TIntro::Assume(_, t) => self.zonk_ty(t, s.span),
                        TIntro::Hyp(_, f) => self.zonk_formula(f),
                    }
                }
                if let TStepBody::Prove { goal, proof } = &mut s.body {
                    self.zonk_formula(goal);
                    self.zonk_proof(proof);
                }
            }
        }
    }
}
