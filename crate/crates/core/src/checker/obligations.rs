//! Turning proof trees into prover tasks.

use std::collections::{BTreeSet, HashMap};

use crate::kernel::{self, induction_scheme, induction_scheme_with, unfold_definition, Formula, Sort, View};
use crate::prover::Sequent;
use crate::species::typed::{TFormula, TIntro, TProof, TStep, TStepBody, TypedSpecies};
use crate::species::{EntryKind, Env, SpeciesInfo};
use crate::syntax::ast::{Citations, Justification, Name, Proof, StepBody, StepLabel};
use crate::syntax::Span;

use super::{CheckError, CheckErrorKind};

/// A single prover task from one proof step.
#[derive(Clone, Debug)]
pub struct Obligation {
    pub theorem: String,
    pub label: String,
    pub sequent: Sequent,
    /// Names of the facts, as cited.
    pub citations: Vec<String>,
    /// Assumptions in scope; the only free names the sequent may use.
    pub premises: Vec<(String, Sort)>,
    /// Closed by the induction rule rather than by the prover.
    pub by_induction: bool,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum PlanItem {
    Obligation(Obligation),
    Error(CheckError),
}

/// What has to happen for one statement of a species.
#[derive(Clone, Debug)]
pub enum TheoremPlan {
    Check { name: String, items: Vec<PlanItem> },
    Inherited { name: String, origin: String },
    Invalidated { name: String, by: String, span: Span },
}

impl TheoremPlan {
    pub fn name(&self) -> &str {
        match self {
            TheoremPlan::Check { name, .. } | TheoremPlan::Inherited { name, .. } | TheoremPlan::Invalidated { name, .. } => name,
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Scope {
    assumptions: Vec<(String, Sort)>,
    hyps: Vec<(String, Formula)>,
    steps: Vec<(StepLabel, Formula)>,
}

struct Walker<'a> {
    info: &'a SpeciesInfo,
    env: &'a Env,
    theorem: String,
    /// Earlier statements `conclude` may rely on.
    context: Vec<(String, Formula)>,
    items: Vec<PlanItem>,
}

/// Plans for every statement with a proof, in declaration order, each
/// listing its obligations in step preorder.
pub fn plan_species(info: &SpeciesInfo, env: &Env) -> Vec<TheoremPlan> {
    let flat = &info.flat;
    let mut out = Vec::new();
    for e in &flat.entries {
        let EntryKind::Statement(st) = &e.kind else { continue };
        if let Some(by) = &st.invalidated_by {
            out.push(TheoremPlan::Invalidated { name: e.name.clone(), by: by.clone(), span: e.span });
            continue;
        }
        let Some(p) = &st.proof else { continue };
        if p.origin != flat.name {
            out.push(TheoremPlan::Inherited { name: e.name.clone(), origin: p.origin.clone() });
            continue;
        }
        let typed = &info.typed.statements[&e.name];
        let Some(proof) = &typed.proof else { continue };
        let mut w = Walker { info, env, theorem: e.name.clone(), context: Vec::new(), items: Vec::new() };
        if uses_conclude(&p.proof) {
            w.context = conclude_statements(info, &e.name);
        }
        match kernel::formula(&typed.formula, &View::own()) {
            Ok(goal) => w.proof(proof, &goal, &Scope::default(), "qed", p.span),
            Err(err) => w.error("qed", CheckErrorKind::Kernel(err.to_string()), p.span),
        }
        out.push(TheoremPlan::Check { name: e.name.clone(), items: w.items });
    }
    out
}

/// Every obligation of a species, in the order they are reported.
pub fn obligations_of(info: &SpeciesInfo, env: &Env) -> Vec<Obligation> {
    plan_species(info, env)
        .into_iter()
        .flat_map(|p| match p {
            TheoremPlan::Check { items, .. } => items,
            _ => Vec::new(),
        })
        .filter_map(|i| match i {
            PlanItem::Obligation(o) => Some(o),
            PlanItem::Error(_) => None,
        })
        .collect()
}

fn uses_conclude(p: &Proof) -> bool {
    match p {
        Proof::By(j) => matches!(j, Justification::Conclude),
        Proof::Steps(steps) => steps.iter().any(|s| match &s.body {
            StepBody::Prove { proof, .. } => uses_conclude(proof),
            StepBody::Qed(j) => matches!(j, Justification::Conclude),
        }),
    }
}

/// Statements declared before `current` whose own proofs cannot lead back
/// to it, either by citation or through a `conclude`.
fn conclude_statements(info: &SpeciesInfo, current: &str) -> Vec<(String, Formula)> {
    let flat = &info.flat;
    let order: Vec<&str> = flat.statements().map(|(e, _)| e.name.as_str()).collect();
    let pos = |n: &str| order.iter().position(|x| *x == n);
    let Some(cur) = pos(current) else { return Vec::new() };
    let edges = |n: &str| -> Vec<String> {
        let Some(st) = flat.get(n).and_then(|e| e.statement()) else { return Vec::new() };
        let Some(p) = &st.proof else { return Vec::new() };
        let mut out: Vec<String> = p.decl_deps.iter().filter(|d| !d.contains('!')).cloned().collect();
        if uses_conclude(&p.proof) {
            if let Some(i) = pos(n) {
                out.extend(order[..i].iter().map(|s| s.to_string()));
            }
        }
        out
    };
    let reaches_current = |start: &str| {
        let mut seen = BTreeSet::new();
        let mut stack = vec![start.to_string()];
        while let Some(n) = stack.pop() {
            if n == current {
                return true;
            }
            if seen.insert(n.clone()) {
                stack.extend(edges(&n));
            }
        }
        false
    };
    order[..cur]
        .iter()
        .filter(|n| !reaches_current(n))
        .filter_map(|n| {
            let t = info.typed.statements.get(*n)?;
            kernel::formula(&t.formula, &View::own()).ok().map(|f| (n.to_string(), f))
        })
        .collect()
}

/// `all assumptions, hyps -> goal`.
fn close(assumes: &[(String, Sort)], hyps: &[(String, Formula)], goal: Formula) -> Formula {
    Formula::forall(assumes, Formula::guarded(hyps.iter().map(|(_, f)| f.clone()).collect(), goal))
}

impl<'a> Walker<'a> {
    fn error(&mut self, label: &str, kind: CheckErrorKind, span: Span) {
        self.items.push(PlanItem::Error(CheckError { theorem: self.theorem.clone(), label: label.to_string(), kind, span }));
    }

    fn translate(&self, f: &TFormula) -> Result<Formula, CheckErrorKind> {
        kernel::formula(f, &View::own()).map_err(|e| CheckErrorKind::Kernel(e.to_string()))
    }

    fn proof(&mut self, proof: &TProof, goal: &Formula, scope: &Scope, label: &str, span: Span) {
        match proof {
            TProof::By(j) => self.justify(label, j, goal, scope, span),
            TProof::Steps(steps) => self.block(steps, goal, scope, span),
        }
    }

    fn intros(&self, step: &TStep) -> Result<(Vec<(String, Sort)>, Vec<(String, Formula)>), CheckErrorKind> {
        let mut assumes = Vec::new();
        let mut hyps = Vec::new();
        for i in &step.intros {
            match i {
                TIntro::Assume(x, ty) => {
                    let s = View::own().sort(ty).map_err(|e| CheckErrorKind::Kernel(e.to_string()))?;
                    assumes.push((x.clone(), s));
                }
                TIntro::Hyp(h, f) => hyps.push((h.clone(), self.translate(f)?)),
            }
        }
        Ok((assumes, hyps))
    }

    fn block(&mut self, steps: &[TStep], goal: &Formula, outer: &Scope, span: Span) {
        let induction = steps.iter().any(|s| s.label.id == "b" || s.label.id == "i");
        let mut scope = outer.clone();
        let mut closed_cases: HashMap<String, (Vec<(String, Sort)>, Vec<(String, Formula)>, Formula, Span)> = HashMap::new();
        let mut finished = false;
        for step in steps {
            let label = step.label.to_string();
            let (assumes, hyps) = match self.intros(step) {
                Ok(x) => x,
                Err(k) => {
                    self.error(&label, k, step.span);
                    continue;
                }
            };
            let mut local = scope.clone();
            local.assumptions.extend(assumes.iter().cloned());
            local.hyps.extend(hyps.iter().cloned());
            match &step.body {
                TStepBody::Prove { goal: g, proof } => {
                    let gk = match self.translate(g) {
                        Ok(f) => f,
                        Err(k) => {
                            self.error(&label, k, step.span);
                            continue;
                        }
                    };
                    self.proof(proof, &gk, &local, &label, step.span);
                    if induction && (step.label.id == "b" || step.label.id == "i") {
                        closed_cases.insert(step.label.id.clone(), (assumes.clone(), hyps.clone(), gk.clone(), step.span));
                    }
                    scope.steps.push((step.label.clone(), close(&assumes, &hyps, gk)));
                }
                TStepBody::Qed(j) => {
                    if induction {
                        self.induction(&label, goal, &closed_cases, &local, step.span);
                    } else {
                        self.justify(&label, j, goal, &local, step.span);
                    }
                    finished = true;
                    break;
                }
            }
        }
        if !finished {
            let label = steps.last().map(|s| format!("<{}>f", s.label.level)).unwrap_or_else(|| "qed".into());
            self.error(&label, CheckErrorKind::MissingQed, span);
        }
    }

    fn induction(
        &mut self,
        label: &str,
        goal: &Formula,
        cases: &HashMap<String, (Vec<(String, Sort)>, Vec<(String, Formula)>, Formula, Span)>,
        scope: &Scope,
        span: Span,
    ) {
        let scheme = match induction_scheme(goal) {
            Ok(s) => s,
            Err(_) => {
                let expected = "a goal of the form all l : list(T), P(l)".to_string();
                return self.error(label, CheckErrorKind::CaseMismatch { expected, found: goal.to_string() }, span);
            }
        };
        let mut ok = true;
        match cases.get("b") {
            None => {
                ok = false;
                self.error(label, CheckErrorKind::MissingCase("b".into()), span);
            }
            Some((assumes, hyps, g, sp)) => {
                let found = close(assumes, hyps, g.clone());
                if !found.alpha_eq(&scheme.base) {
                    ok = false;
                    let kind = CheckErrorKind::CaseMismatch { expected: scheme.base.to_string(), found: found.to_string() };
                    self.error(&format!("<{}>b", level_of(label)), kind, *sp);
                }
            }
        }
        match cases.get("i") {
            None => {
                ok = false;
                self.error(label, CheckErrorKind::MissingCase("i".into()), span);
            }
            Some((assumes, hyps, g, sp)) => {
                let list_sort = Sort::list(scheme.elem.clone());
                let tail = assumes.iter().find(|(_, s)| *s == list_sort).map(|(x, _)| x.clone());
                let head = assumes.iter().find(|(_, s)| *s == scheme.elem).map(|(x, _)| x.clone());
                let found = close(assumes, hyps, g.clone());
                let matches = match (head, tail) {
                    (Some(h), Some(t)) if assumes.len() == 2 && hyps.len() == 1 => match induction_scheme_with(goal, &h, &t) {
                        Ok(s) => hyps[0].1.alpha_eq(&s.hypothesis) && g.alpha_eq(&s.step),
                        Err(_) => false,
                    },
                    _ => false,
                };
                if !matches {
                    ok = false;
                    let kind = CheckErrorKind::CaseMismatch { expected: scheme.step_statement().to_string(), found: found.to_string() };
                    self.error(&format!("<{}>i", level_of(label)), kind, *sp);
                }
            }
        }
        if ok {
            self.items.push(PlanItem::Obligation(Obligation {
                theorem: self.theorem.clone(),
                label: label.to_string(),
                sequent: Sequent::new(goal.clone()),
                citations: vec!["induction".into()],
                premises: scope.assumptions.clone(),
                by_induction: true,
                span,
            }));
        }
    }

    fn justify(&mut self, label: &str, j: &Justification, goal: &Formula, scope: &Scope, span: Span) {
        let mut seq = Sequent::new(goal.clone());
        let mut citations = Vec::new();
        match j {
            Justification::Conclude => {
                for (n, f) in &scope.hyps {
                    seq = seq.fact(n, f.clone());
                    citations.push(n.clone());
                }
                for (l, f) in &scope.steps {
                    seq = seq.fact(&l.to_string(), f.clone());
                    citations.push(l.to_string());
                }
                for (n, f) in &self.context {
                    seq = seq.fact(n, f.clone());
                    citations.push(n.clone());
                }
            }
            Justification::By(c) => match self.cite(c, scope) {
                Ok(facts) => {
                    for (n, f, def) in facts {
                        seq = if def { seq.definition(&n, f) } else { seq.fact(&n, f) };
                        citations.push(n);
                    }
                }
                Err((kind, sp)) => return self.error(label, kind, sp.unwrap_or(span)),
            },
        }
        self.items.push(PlanItem::Obligation(Obligation {
            theorem: self.theorem.clone(),
            label: label.to_string(),
            sequent: seq,
            citations,
            premises: scope.assumptions.clone(),
            by_induction: false,
            span,
        }));
    }

    #[allow(clippy::type_complexity)]
    fn cite(&self, c: &Citations, scope: &Scope) -> Result<Vec<(String, Formula, bool)>, (CheckErrorKind, Option<Span>)> {
        let mut out = Vec::new();
        for h in &c.hypotheses {
            match scope.hyps.iter().rev().find(|(n, _)| *n == h.name) {
                Some((n, f)) => out.push((n.clone(), f.clone(), false)),
                None => return Err((CheckErrorKind::UnknownHypothesis(h.name.clone()), Some(h.span))),
            }
        }
        for (l, sp) in &c.steps {
            match scope.steps.iter().rev().find(|(x, _)| x == l) {
                Some((x, f)) => out.push((x.to_string(), f.clone(), false)),
                None => return Err((CheckErrorKind::StepOutOfScope(l.to_string()), Some(*sp))),
            }
        }
        for n in c.properties.iter().chain(&c.theorems) {
            let f = self.statement(n).map_err(|k| (k, Some(n.span)))?;
            out.push((n.to_string(), f, false));
        }
        for n in &c.definitions {
            let axioms = self.definition(n).map_err(|k| (k, Some(n.span)))?;
            let many = axioms.len() > 1;
            for (i, f) in axioms.into_iter().enumerate() {
                let name = if many { format!("def:{n}#{}", i + 1) } else { format!("def:{n}") };
                out.push((name, f, true));
            }
        }
        Ok(out)
    }

    /// The typed species behind a qualifier, with the view it is seen through.
    fn qualified(&self, q: &str) -> Option<(&'a TypedSpecies, View)> {
        if let Some(p) = self.info.flat.param(q) {
            let s = self.env.species.get(&p.interface)?;
            return Some((&s.typed, View::through(q)));
        }
        let c = self.env.collections.get(q)?;
        Some((&c.species.typed, View::through(q)))
    }

    fn statement(&self, n: &Name) -> Result<Formula, CheckErrorKind> {
        let unknown = || CheckErrorKind::UnknownName(n.to_string());
        let (typed, view) = match &n.qualifier {
            None => (&*self.info.typed, View::own()),
            Some(q) => self.qualified(q).ok_or_else(unknown)?,
        };
        let st = typed.statements.get(&n.name).ok_or_else(unknown)?;
        kernel::formula(&st.formula, &view).map_err(|e| CheckErrorKind::Kernel(e.to_string()))
    }

    fn definition(&self, n: &Name) -> Result<Vec<Formula>, CheckErrorKind> {
        let (typed, view) = match &n.qualifier {
            None => {
                let entry = self.info.flat.get(&n.name).ok_or_else(|| CheckErrorKind::UnknownName(n.to_string()))?;
                match &entry.kind {
                    EntryKind::Function(Some(_)) | EntryKind::Logical(_) => {}
                    EntryKind::Function(None) => return Err(CheckErrorKind::CitesUnprovenDefinition(n.to_string())),
                    EntryKind::Statement(_) => return Err(CheckErrorKind::UnknownName(n.to_string())),
                }
                (&*self.info.typed, View::own())
            }
            // A parameter is only known through its interface.
            Some(q) if self.info.flat.param(q).is_some() => {
                return Err(CheckErrorKind::CitesUnprovenDefinition(n.to_string()));
            }
            Some(q) => self.qualified(q).ok_or_else(|| CheckErrorKind::UnknownName(n.to_string()))?,
        };
        match unfold_definition(&n.name, typed, &view) {
            Ok(ax) => Ok(ax.into_iter().map(|a| a.axiom).collect()),
            Err(kernel::KernelError::NotDefined(_)) => Err(CheckErrorKind::CitesUnprovenDefinition(n.to_string())),
            Err(e) => Err(CheckErrorKind::Kernel(e.to_string())),
        }
    }
}

fn level_of(label: &str) -> &str {
    label.trim_start_matches('<').split('>').next().unwrap_or("")
}

/// Free names of a sequent that are not among its premises. Skolem and
/// assumption constants are variables; method symbols are not.
pub fn unbound_names(o: &Obligation) -> Vec<String> {
    let mut out = BTreeSet::new();
    let premises: Vec<&str> = o.premises.iter().map(|(x, _)| x.as_str()).collect();
    let mut check = |f: &Formula| {
        for (x, _) in f.free_vars() {
            if !premises.contains(&x.as_str()) {
                out.insert(x);
            }
        }
    };
    for fact in &o.sequent.facts {
        check(&fact.formula);
    }
    check(&o.sequent.goal);
    out.into_iter().collect()
}

