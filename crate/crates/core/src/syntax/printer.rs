//! Canonical pretty-printer. Output reparses to a structurally equal tree.

use std::fmt::Write;

use super::ast::*;

const INDENT: &str = "  ";

pub fn print_unit(unit: &SourceUnit) -> String {
    let mut out = String::new();
    for (i, phrase) in unit.phrases.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match phrase {
            Phrase::Species(s) => print_species(&mut out, s),
            Phrase::Collection(c) => {
                let _ = writeln!(out, "collection {} = implement {}; end;;", c.name.name, species_expr(&c.implements));
            }
        }
    }
    out
}

fn species_expr(e: &SpeciesExpr) -> String {
    if e.args.is_empty() {
        e.name.name.clone()
    } else {
        let args: Vec<&str> = e.args.iter().map(|a| a.name.as_str()).collect();
        format!("{}({})", e.name.name, args.join(", "))
    }
}

fn print_species(out: &mut String, s: &SpeciesDecl) {
    let _ = write!(out, "species {}", s.name.name);
    if !s.params.is_empty() {
        let params: Vec<String> =
            s.params.iter().map(|p| format!("{} is {}", p.name.name, species_expr(&p.interface))).collect();
        let _ = write!(out, " ({})", params.join(", "));
    }
    out.push_str(" =\n");
    if !s.inherits.is_empty() {
        let parents: Vec<String> = s.inherits.iter().map(species_expr).collect();
        let _ = writeln!(out, "{INDENT}inherit {};", parents.join(", "));
    }
    for m in &s.methods {
        print_method(out, &m.kind);
        out.push_str(";\n");
    }
    out.push_str("end;;\n");
}

fn params(ps: &[Param]) -> String {
    if ps.is_empty() {
        return String::new();
    }
    let items: Vec<String> = ps
        .iter()
        .map(|p| match &p.ty {
            Some(t) => format!("{} : {}", p.name.name, type_expr(t)),
            None => p.name.name.clone(),
        })
        .collect();
    format!("({})", items.join(", "))
}

fn print_method(out: &mut String, m: &MethodKind) {
    out.push_str(INDENT);
    match m {
        MethodKind::Signature { name, ty } => {
            let _ = write!(out, "signature {} : {}", name.name, type_expr(ty));
        }
        MethodKind::Representation(ty) => {
            let _ = write!(out, "representation = {}", type_expr(ty));
        }
        MethodKind::Let(def) => {
            if def.is_final {
                out.push_str("final ");
            }
            out.push_str(if def.is_rec { "let rec " } else { "let " });
            out.push_str(&def.name.name);
            out.push_str(&params(&def.params));
            if let Some(ret) = &def.ret {
                let _ = write!(out, " : {}", type_expr(ret));
            }
            let _ = write!(out, " =\n{INDENT}{INDENT}{}", expr(&def.body, 0));
            if let Some(t) = &def.termination {
                let _ = write!(out, "\n{INDENT}{INDENT}termination proof = structural {}", t.name);
            }
        }
        MethodKind::Logical(def) => {
            out.push_str(if def.is_final { "logical final let " } else { "logical let " });
            out.push_str(&def.name.name);
            out.push_str(&params(&def.params));
            let _ = write!(out, " =\n{INDENT}{INDENT}{}", formula(&def.body, 0));
        }
        MethodKind::Property { name, formula: f } => {
            let _ = write!(out, "property {} :\n{INDENT}{INDENT}{}", name.name, formula(f, 0));
        }
        MethodKind::Theorem { name, formula: f, proof } => {
            let _ = write!(out, "theorem {} :\n{INDENT}{INDENT}{}\n{INDENT}proof =", name.name, formula(f, 0));
            print_proof(out, proof, 2);
        }
        MethodKind::ProofOf { name, proof } => {
            let _ = write!(out, "proof of {} =", name.name);
            print_proof(out, proof, 2);
        }
    }
}

fn print_proof(out: &mut String, proof: &Proof, depth: usize) {
    match proof {
        Proof::By(j) => {
            out.push(' ');
            out.push_str(&justification(j));
        }
        Proof::Steps(steps) => {
            for s in steps {
                out.push('\n');
                print_step(out, s, depth);
            }
        }
    }
}

fn print_step(out: &mut String, s: &ProofStep, depth: usize) {
    let pad = INDENT.repeat(depth);
    let cont = format!("{pad}{INDENT}{INDENT}");
    let _ = write!(out, "{pad}{}", s.label);
    let mut first = true;
    let mut sep = |out: &mut String| {
        if first {
            out.push(' ');
            first = false;
        } else {
            out.push('\n');
            out.push_str(&cont);
        }
    };
    for intro in &s.intros {
        sep(out);
        match intro {
            Intro::Assume { names, ty } => {
                let names: Vec<&str> = names.iter().map(|n| n.name.as_str()).collect();
                let _ = write!(out, "assume {} : {},", names.join(" "), type_expr(ty));
            }
            Intro::Hypothesis { name, formula: f } => {
                let _ = write!(out, "hypothesis {} : {},", name.name, formula(f, 0));
            }
        }
    }
    sep(out);
    match &s.body {
        StepBody::Prove { goal, proof } => {
            let _ = write!(out, "prove {}", formula(goal, 0));
            match proof {
                Proof::By(j) => {
                    let _ = write!(out, "\n{cont}{}", justification(j));
                }
                Proof::Steps(_) => print_proof(out, proof, depth + 1),
            }
        }
        StepBody::Qed(Justification::Conclude) => out.push_str("conclude"),
        StepBody::Qed(j) => {
            let _ = write!(out, "qed {}", justification(j));
        }
    }
}

fn justification(j: &Justification) -> String {
    let c = match j {
        Justification::Conclude => return "conclude".to_string(),
        Justification::By(c) => c,
    };
    let mut parts = Vec::new();
    let names = |ns: &[Name]| ns.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
    if !c.definitions.is_empty() {
        parts.push(format!("definition of {}", names(&c.definitions)));
    }
    if !c.properties.is_empty() {
        parts.push(format!("property {}", names(&c.properties)));
    }
    if !c.theorems.is_empty() {
        parts.push(format!("theorem {}", names(&c.theorems)));
    }
    if !c.hypotheses.is_empty() {
        let hs: Vec<&str> = c.hypotheses.iter().map(|h| h.name.as_str()).collect();
        parts.push(format!("hypothesis {}", hs.join(", ")));
    }
    if !c.steps.is_empty() {
        let ls: Vec<String> = c.steps.iter().map(|(l, _)| l.to_string()).collect();
        parts.push(format!("step {}", ls.join(", ")));
    }
    format!("by {}", parts.join(" "))
}

pub fn type_expr(t: &TypeExpr) -> String {
    match t {
        TypeExpr::SelfType(_) => "Self".into(),
        TypeExpr::Bool(_) => "bool".into(),
        TypeExpr::Int(_) => "int".into(),
        TypeExpr::Param(id) => id.name.clone(),
        TypeExpr::List(inner, _) => format!("list({})", type_expr(inner)),
        TypeExpr::Arrow(args, ret) => {
            let mut parts: Vec<String> = args
                .iter()
                .map(|a| match a {
                    TypeExpr::Arrow(..) => format!("({})", type_expr(a)),
                    _ => type_expr(a),
                })
                .collect();
            parts.push(match **ret {
                TypeExpr::Arrow(..) => format!("({})", type_expr(ret)),
                _ => type_expr(ret),
            });
            parts.join(" -> ")
        }
    }
}

// Formula precedence: 0 quantifier, 1 iff, 2 implies, 3 or, 4 and, 5 not, 6 atom.
pub fn formula(f: &Formula, ctx: u8) -> String {
    let (prec, text) = match &f.kind {
        FormulaKind::All(vars, ty, body) | FormulaKind::Ex(vars, ty, body) => {
            let q = if matches!(f.kind, FormulaKind::All(..)) { "all" } else { "ex" };
            let vs: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
            (0, format!("{q} {} : {}, {}", vs.join(" "), type_expr(ty), formula(body, 0)))
        }
        FormulaKind::Iff(a, b) => (1, format!("{} <-> {}", formula(a, 1), formula(b, 2))),
        FormulaKind::Implies(a, b) => (2, format!("{} -> {}", formula(a, 3), formula(b, 2))),
        FormulaKind::Or(a, b) => (3, format!("{} \\/ {}", formula(a, 3), formula(b, 4))),
        FormulaKind::And(a, b) => (4, format!("{} /\\ {}", formula(a, 4), formula(b, 5))),
        FormulaKind::Not(a) => (5, format!("not {}", formula(a, 5))),
        FormulaKind::Atom(e) => (6, expr(e, 1)),
        FormulaKind::Eq(a, b) => (6, format!("{} = {}", expr(a, 5), expr(b, 5))),
    };
    if prec < ctx {
        format!("({text})")
    } else {
        text
    }
}

fn list_literal(e: &Expr) -> Option<Vec<&Expr>> {
    let mut items = Vec::new();
    let mut cur = e;
    loop {
        match &cur.kind {
            ExprKind::Nil => return Some(items),
            ExprKind::Cons(h, t) => {
                items.push(&**h);
                cur = t;
            }
            _ => return None,
        }
    }
}

fn args(es: &[Expr]) -> String {
    es.iter().map(|e| expr(e, 1)).collect::<Vec<_>>().join(", ")
}

// Expression precedence: 0 if/match/let, 1 or, 2 and, 3 not, 4 =, 5 ::, 6 + -, 7 atom.
pub fn expr(e: &Expr, ctx: u8) -> String {
    let (prec, text) = match &e.kind {
        ExprKind::Var(v) => (7, v.clone()),
        ExprKind::Bool(b) => (7, b.to_string()),
        ExprKind::Int(n) => (7, n.to_string()),
        ExprKind::App { callee, args: a } => (7, format!("{callee}({})", args(a))),
        ExprKind::Qualified { collection, method, args: a } => match a {
            Some(a) => (7, format!("{collection}!{method}({})", args(a))),
            None => (7, format!("{collection}!{method}")),
        },
        ExprKind::Nil => (7, "[]".into()),
        ExprKind::Cons(h, t) => match list_literal(e) {
            Some(items) => (7, format!("[{}]", items.iter().map(|i| expr(i, 1)).collect::<Vec<_>>().join("; "))),
            None => (5, format!("{} :: {}", expr(h, 6), expr(t, 5))),
        },
        ExprKind::Add(a, b) => (6, format!("{} + {}", expr(a, 6), expr(b, 7))),
        ExprKind::Sub(a, b) => (6, format!("{} - {}", expr(a, 6), expr(b, 7))),
        ExprKind::Equal(a, b) => (4, format!("{} = {}", expr(a, 5), expr(b, 5))),
        ExprKind::Not(a) => (3, format!("not {}", expr(a, 3))),
        ExprKind::And(a, b) => (2, format!("{} && {}", expr(a, 2), expr(b, 3))),
        ExprKind::Or(a, b) => (1, format!("{} || {}", expr(a, 1), expr(b, 2))),
        ExprKind::If(c, a, b) => (0, format!("if {} then {} else {}", expr(c, 0), expr(a, 0), expr(b, 0))),
        ExprKind::Match { scrutinee, arms } => {
            let last = arms.len().saturating_sub(1);
            let arms: Vec<String> = arms
                .iter()
                .enumerate()
                .map(|(i, arm)| {
                    // A nested match in a middle arm would swallow the arms after it.
                    let nested = i < last && matches!(arm.body.kind, ExprKind::Match { .. });
                    let body = if nested { format!("({})", expr(&arm.body, 0)) } else { expr(&arm.body, 0) };
                    format!("| {} -> {}", pattern(&arm.pattern), body)
                })
                .collect();
            (0, format!("match {} with {}", expr(scrutinee, 0), arms.join(" ")))
        }
        ExprKind::LetIn { name, bound, body } => {
            (0, format!("let {} = {} in {}", name.name, expr(bound, 0), expr(body, 0)))
        }
    };
    if prec < ctx {
        format!("({text})")
    } else {
        text
    }
}

fn patvar(p: &PatVar) -> &str {
    match p {
        PatVar::Var(n) => n,
        PatVar::Wildcard => "_",
    }
}

fn pattern(p: &Pattern) -> String {
    match p {
        Pattern::Nil => "[]".into(),
        Pattern::Cons(h, t) => format!("{} :: {}", patvar(h), patvar(t)),
        Pattern::Wildcard => "_".into(),
        Pattern::Var(v) => v.clone(),
    }
}
