//! Typechecked trees. Names are resolved: locals, own methods and
//! qualified methods are distinct node kinds.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::syntax::ast::{Justification, Pattern, StepLabel};
use crate::syntax::Span;

use super::types::Ty;

#[derive(Clone, Debug, PartialEq)]
pub struct TExpr {
    pub kind: TExprKind,
    pub ty: Ty,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TExprKind {
    Local(String),
    /// Call of a method of the species itself; constants have no arguments.
    CallMethod(String, Vec<TExpr>),
    /// A method used as a value.
    MethodRef(String),
    CallQualified(String, String, Vec<TExpr>),
    QualifiedRef(String, String),
    /// Call of a function-typed local.
    CallLocal(String, Vec<TExpr>),
    If(Box<TExpr>, Box<TExpr>, Box<TExpr>),
    Match(Box<TExpr>, Vec<TArm>),
    Let(String, Box<TExpr>, Box<TExpr>),
    And(Box<TExpr>, Box<TExpr>),
    Or(Box<TExpr>, Box<TExpr>),
    Not(Box<TExpr>),
    Nil,
    Cons(Box<TExpr>, Box<TExpr>),
    Add(Box<TExpr>, Box<TExpr>),
    Sub(Box<TExpr>, Box<TExpr>),
    Equal(Box<TExpr>, Box<TExpr>),
    Bool(bool),
    Int(BigInt),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TArm {
    pub pattern: Pattern,
    pub body: TExpr,
}

impl TExpr {
    pub fn new(kind: TExprKind, ty: Ty, span: Span) -> TExpr {
        TExpr { kind, ty, span }
    }

    pub fn children(&self) -> Vec<&TExpr> {
        use TExprKind::*;
        match &self.kind {
            Local(_) | MethodRef(_) | QualifiedRef(..) | Nil | Bool(_) | Int(_) => vec![],
            CallMethod(_, a) | CallQualified(_, _, a) | CallLocal(_, a) => a.iter().collect(),
            If(a, b, c) => vec![a, b, c],
            Match(s, arms) => std::iter::once(&**s).chain(arms.iter().map(|a| &a.body)).collect(),
            Let(_, a, b) | And(a, b) | Or(a, b) | Cons(a, b) | Add(a, b) | Sub(a, b) | Equal(a, b) => vec![a, b],
            Not(a) => vec![a],
        }
    }

    /// Preorder traversal.
    pub fn walk(&self, f: &mut dyn FnMut(&TExpr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TFormula {
    pub kind: TFormulaKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TFormulaKind {
    All(String, Ty, Box<TFormula>),
    Ex(String, Ty, Box<TFormula>),
    And(Box<TFormula>, Box<TFormula>),
    Or(Box<TFormula>, Box<TFormula>),
    Implies(Box<TFormula>, Box<TFormula>),
    Iff(Box<TFormula>, Box<TFormula>),
    Not(Box<TFormula>),
    /// A bool or prop valued expression.
    Atom(TExpr),
    Eq(TExpr, TExpr),
    True,
    False,
}

impl TFormula {
    pub fn new(kind: TFormulaKind, span: Span) -> TFormula {
        TFormula { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TProof {
    By(Justification),
    Steps(Vec<TStep>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TStep {
    pub label: StepLabel,
    pub intros: Vec<TIntro>,
    pub body: TStepBody,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TIntro {
    Assume(String, Ty),
    Hyp(String, TFormula),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TStepBody {
    Prove { goal: TFormula, proof: TProof },
    Qed(Justification),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TFunction {
    pub params: Vec<(String, Ty)>,
    pub ret: Ty,
    pub body: TExpr,
    pub is_rec: bool,
    pub termination: Option<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TLogical {
    pub params: Vec<(String, Ty)>,
    pub body: TFormula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TStatement {
    pub formula: TFormula,
    /// Present only for proofs given in this species.
    pub proof: Option<TProof>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TypedSpecies {
    pub name: String,
    /// Elaborated representation of `Self`, when defined.
    pub carrier: Option<Ty>,
    /// Type of every function and logical definition. `Self` already
    /// replaced by the representation.
    pub types: HashMap<String, Ty>,
    pub functions: HashMap<String, TFunction>,
    pub logicals: HashMap<String, TLogical>,
    pub statements: HashMap<String, TStatement>,
}
