use num_bigint::BigInt;

use super::span::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>, span: Span) -> Ident {
        Ident { name: name.into(), span }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceUnit {
    pub phrases: Vec<Phrase>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phrase {
    Species(SpeciesDecl),
    Collection(CollectionDecl),
}

impl Phrase {
    pub fn name(&self) -> &Ident {
        match self {
            Phrase::Species(s) => &s.name,
            Phrase::Collection(c) => &c.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Phrase::Species(s) => s.span,
            Phrase::Collection(c) => c.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesDecl {
    pub name: Ident,
    pub params: Vec<SpeciesParam>,
    pub inherits: Vec<SpeciesExpr>,
    pub methods: Vec<Method>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesParam {
    pub name: Ident,
    pub interface: SpeciesExpr,
}

/// `Name` or `Name(arg, ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesExpr {
    pub name: Ident,
    pub args: Vec<Ident>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectionDecl {
    pub name: Ident,
    pub implements: SpeciesExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Method {
    pub kind: MethodKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MethodKind {
    Signature { name: Ident, ty: TypeExpr },
    Representation(TypeExpr),
    Let(LetDef),
    Logical(LogicalDef),
    Property { name: Ident, formula: Formula },
    Theorem { name: Ident, formula: Formula, proof: Proof },
    ProofOf { name: Ident, proof: Proof },
}

impl MethodKind {
    /// The name this method introduces, if any. `proof of` completes an
    /// existing name and `representation` is the carrier.
    pub fn introduced_name(&self) -> Option<&Ident> {
        match self {
            MethodKind::Signature { name, .. }
            | MethodKind::Property { name, .. }
            | MethodKind::Theorem { name, .. } => Some(name),
            MethodKind::Let(def) => Some(&def.name),
            MethodKind::Logical(def) => Some(&def.name),
            MethodKind::Representation(_) | MethodKind::ProofOf { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetDef {
    pub name: Ident,
    pub params: Vec<Param>,
    pub ret: Option<TypeExpr>,
    pub body: Expr,
    pub is_rec: bool,
    pub is_final: bool,
    /// The parameter named in `termination proof = structural p`.
    pub termination: Option<Ident>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalDef {
    pub name: Ident,
    pub params: Vec<Param>,
    pub body: Formula,
    pub is_final: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub name: Ident,
    pub ty: Option<TypeExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    SelfType(Span),
    Bool(Span),
    Int(Span),
    Param(Ident),
    List(Box<TypeExpr>, Span),
    Arrow(Vec<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn span(&self) -> Span {
        match self {
            TypeExpr::SelfType(s) | TypeExpr::Bool(s) | TypeExpr::Int(s) | TypeExpr::List(_, s) => *s,
            TypeExpr::Param(id) => id.span,
            TypeExpr::Arrow(args, ret) => args.first().map(|a| a.span()).unwrap_or(ret.span()).to(ret.span()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Var(String),
    Bool(bool),
    Int(BigInt),
    App { callee: String, args: Vec<Expr> },
    /// `C!m` or `C!m(args)`; `args` is `None` when written without parentheses.
    Qualified { collection: String, method: String, args: Option<Vec<Expr>> },
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Match { scrutinee: Box<Expr>, arms: Vec<MatchArm> },
    LetIn { name: Ident, bound: Box<Expr>, body: Box<Expr> },
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Nil,
    Cons(Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Equal(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchArm {
    pub pattern: Pattern,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    Nil,
    Cons(PatVar, PatVar),
    Wildcard,
    Var(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PatVar {
    Var(String),
    Wildcard,
}

impl PatVar {
    pub fn name(&self) -> Option<&str> {
        match self {
            PatVar::Var(n) => Some(n),
            PatVar::Wildcard => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub kind: FormulaKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaKind {
    All(Vec<Ident>, TypeExpr, Box<Formula>),
    Ex(Vec<Ident>, TypeExpr, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    Atom(Expr),
    Eq(Expr, Expr),
}

impl Formula {
    pub fn new(kind: FormulaKind, span: Span) -> Formula {
        Formula { kind, span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StepLabel {
    pub level: u32,
    pub id: String,
}

impl std::fmt::Display for StepLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<{}>{}", self.level, self.id)
    }
}

/// Body of a `proof = ...` or of a `prove` step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proof {
    By(Justification),
    Steps(Vec<ProofStep>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofStep {
    pub label: StepLabel,
    pub intros: Vec<Intro>,
    pub body: StepBody,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Intro {
    Assume { names: Vec<Ident>, ty: TypeExpr },
    Hypothesis { name: Ident, formula: Formula },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepBody {
    Prove { goal: Formula, proof: Proof },
    /// `qed by ...`, `qed conclude` or a bare `conclude`.
    Qed(Justification),
}

impl ProofStep {
    pub fn is_terminal(&self) -> bool {
        matches!(self.body, StepBody::Qed(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Conclude,
    By(Citations),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Citations {
    pub definitions: Vec<Name>,
    pub properties: Vec<Name>,
    pub hypotheses: Vec<Ident>,
    pub steps: Vec<(StepLabel, Span)>,
    pub theorems: Vec<Name>,
}

/// A possibly qualified method name such as `S!equal_symmetric`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Name {
    pub qualifier: Option<String>,
    pub name: String,
    pub span: Span,
}

impl std::fmt::Display for Name {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.qualifier {
            Some(q) => write!(f, "{q}!{}", self.name),
            None => write!(f, "{}", self.name),
        }
    }
}
