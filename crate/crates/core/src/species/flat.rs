use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::syntax::ast::*;
use crate::syntax::Span;

use super::deps;
use super::env::Env;
use super::error::SpeciesError;
use super::interface::{check_implements, Interface};
use super::rename::Renaming;
use super::types::{elaborate_type, Ty};

#[derive(Clone, Debug, PartialEq)]
pub struct ParamBinding {
    pub name: String,
    /// Name of the species the argument must implement.
    pub interface: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Carrier {
    Declared,
    Defined { ty: TypeExpr, origin: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub params: Vec<Param>,
    pub ret: Option<TypeExpr>,
    pub body: Expr,
    pub is_rec: bool,
    pub termination: Option<Ident>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalDef {
    pub params: Vec<Param>,
    pub body: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofInfo {
    pub proof: Proof,
    /// Species whose body supplied the proof.
    pub origin: String,
    /// Each `definition of` citation with the origin of the definition the
    /// proof was checked against.
    pub def_deps: BTreeMap<String, String>,
    pub decl_deps: BTreeSet<String>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub formula: Formula,
    pub is_theorem: bool,
    pub proof: Option<ProofInfo>,
    /// Set when an inherited proof was erased by a redefinition.
    pub invalidated_by: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EntryKind {
    Function(Option<FunctionDef>),
    Logical(LogicalDef),
    Statement(Statement),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    DeclaredOnly,
    Defined,
    Proved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodEntry {
    pub name: String,
    pub kind: EntryKind,
    /// Elaborated type of functions and logical definitions.
    pub ty: Option<Ty>,
    /// Species where the current declaration or definition was given.
    pub origin: String,
    pub is_final: bool,
    pub span: Span,
}

impl MethodEntry {
    pub fn status(&self) -> Status {
        match &self.kind {
            EntryKind::Function(None) => Status::DeclaredOnly,
            EntryKind::Function(Some(_)) | EntryKind::Logical(_) => Status::Defined,
            EntryKind::Statement(s) if s.proof.is_some() => Status::Proved,
            EntryKind::Statement(_) => Status::DeclaredOnly,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            EntryKind::Function(_) => "function",
            EntryKind::Logical(_) => "logical definition",
            EntryKind::Statement(_) => "statement",
        }
    }

    pub fn is_statement(&self) -> bool {
        matches!(self.kind, EntryKind::Statement(_))
    }

    pub fn statement(&self) -> Option<&Statement> {
        match &self.kind {
            EntryKind::Statement(s) => Some(s),
            _ => None,
        }
    }

    /// Origin of the current definition, if the entry is defined.
    pub fn def_origin(&self) -> Option<&str> {
        match self.kind {
            EntryKind::Function(Some(_)) | EntryKind::Logical(_) => Some(&self.origin),
            _ => None,
        }
    }

    /// Species where the current body or proof was given.
    pub fn body_origin(&self) -> &str {
        match &self.kind {
            EntryKind::Statement(Statement { proof: Some(p), .. }) => &p.origin,
            _ => &self.origin,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatSpecies {
    pub name: String,
    pub params: Vec<ParamBinding>,
    pub parents: Vec<String>,
    pub carrier: Carrier,
    pub entries: Vec<MethodEntry>,
    index: HashMap<String, usize>,
}

impl FlatSpecies {
    pub fn new(name: impl Into<String>) -> FlatSpecies {
        FlatSpecies {
            name: name.into(),
            params: Vec::new(),
            parents: Vec::new(),
            carrier: Carrier::Declared,
            entries: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn get(&self, name: &str) -> Option<&MethodEntry> {
        self.index.get(name).map(|&i| &self.entries[i])
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut MethodEntry> {
        self.index.get(name).map(|&i| &mut self.entries[i])
    }

    pub fn insert(&mut self, entry: MethodEntry) {
        match self.index.get(&entry.name) {
            Some(&i) => self.entries[i] = entry,
            None => {
                self.index.insert(entry.name.clone(), self.entries.len());
                self.entries.push(entry);
            }
        }
    }

    pub fn param(&self, name: &str) -> Option<&ParamBinding> {
        self.params.iter().find(|p| p.name == name)
    }

    pub fn statements(&self) -> impl Iterator<Item = (&MethodEntry, &Statement)> {
        self.entries.iter().filter_map(|e| e.statement().map(|s| (e, s)))
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }
}

struct Flattener<'e> {
    env: &'e Env,
    species: String,
    flat: FlatSpecies,
    errors: Vec<SpeciesError>,
    carrier_names: HashSet<String>,
}

/// Resolve inheritance and parameters of a species declaration.
pub fn flatten(decl: &SpeciesDecl, env: &Env) -> Result<FlatSpecies, Vec<SpeciesError>> {
    let mut f = Flattener {
        env,
        species: decl.name.name.clone(),
        flat: FlatSpecies::new(decl.name.name.clone()),
        errors: Vec::new(),
        carrier_names: env.collection_names(),
    };
    f.params(decl);
    for parent in &decl.inherits {
        f.inherit(parent);
    }
    if !f.errors.is_empty() {
        return Err(f.errors);
    }
    f.body(&decl.methods);
    if f.errors.is_empty() {
        f.check_cycles(decl.span);
    }
    if f.errors.is_empty() {
        Ok(f.flat)
    } else {
        Err(f.errors)
    }
}

impl Flattener<'_> {
    fn params(&mut self, decl: &SpeciesDecl) {
        for p in &decl.params {
            if !p.interface.args.is_empty() {
                self.errors.push(SpeciesError::Unsupported {
                    what: format!("parameterized interface `{}` for parameter `{}`", p.interface.name.name, p.name.name),
                    span: p.interface.span,
                });
                continue;
            }
            let iface = &p.interface.name;
            if !self.env.species.contains_key(&iface.name) {
                let err = if self.env.collections.contains_key(&iface.name) {
                    SpeciesError::Unsupported {
                        what: format!("collection `{}` used as a parameter interface", iface.name),
                        span: iface.span,
                    }
                } else {
                    SpeciesError::UnknownSpecies { name: iface.name.clone(), span: iface.span }
                };
                self.errors.push(err);
                continue;
            }
            self.carrier_names.insert(p.name.name.clone());
            self.flat.params.push(ParamBinding { name: p.name.name.clone(), interface: iface.name.clone() });
        }
    }

    /// Interface seen through an argument: a parameter of this species or a collection.
    fn argument_interface(&self, arg: &Ident) -> Option<Interface> {
        if let Some(p) = self.flat.param(&arg.name) {
            let sp = self.env.species.get(&p.interface)?;
            return Some(Interface::of(&sp.flat));
        }
        let coll = self.env.collections.get(&arg.name)?;
        Some(Interface::of(&coll.species.flat))
    }

    fn inherit(&mut self, parent: &SpeciesExpr) {
        let pname = &parent.name;
        if self.env.collections.contains_key(&pname.name) {
            self.errors.push(SpeciesError::InheritFromCollection { name: pname.name.clone(), span: pname.span });
            return;
        }
        let Some(sp) = self.env.species.get(&pname.name) else {
            self.errors.push(SpeciesError::UnknownSpecies { name: pname.name.clone(), span: pname.span });
            return;
        };
        let pflat = &sp.flat;
        if pflat.params.len() != parent.args.len() {
            self.errors.push(SpeciesError::ArityMismatch {
                species: pname.name.clone(),
                expected: pflat.params.len(),
                found: parent.args.len(),
                span: parent.span,
            });
            return;
        }
        let mut map = HashMap::new();
        for (param, arg) in pflat.params.iter().zip(&parent.args) {
            let Some(found) = self.argument_interface(arg) else {
                self.errors.push(SpeciesError::UnknownCollection { name: arg.name.clone(), span: arg.span });
                continue;
            };
            let required = Interface::of(&self.env.species[&param.interface].flat);
            if let Err(missing) = check_implements(&found, &required) {
                self.errors.push(SpeciesError::InterfaceMismatch {
                    param: param.name.clone(),
                    arg: arg.name.clone(),
                    missing,
                    span: arg.span,
                });
            }
            map.insert(param.name.clone(), arg.name.clone());
        }
        let renamed = rename_flat(pflat, &map);
        self.flat.parents.push(pname.name.clone());
        self.merge(renamed, parent.span);
    }

    fn merge(&mut self, parent: FlatSpecies, span: Span) {
        match (&self.flat.carrier, parent.carrier) {
            (_, Carrier::Declared) => {}
            (Carrier::Declared, c) => self.flat.carrier = c,
            (Carrier::Defined { ty: old, .. }, Carrier::Defined { ty: new, origin }) => {
                if old != &new {
                    self.errors.push(SpeciesError::TypeClash {
                        name: "representation".into(),
                        expected: crate::syntax::printer::type_expr(old),
                        found: crate::syntax::printer::type_expr(&new),
                        span,
                    });
                } else {
                    self.flat.carrier = Carrier::Defined { ty: new, origin };
                }
            }
        }
        for entry in parent.entries {
            let Some(old) = self.flat.get(&entry.name) else {
                self.flat.insert(entry);
                continue;
            };
            if std::mem::discriminant(&old.kind) != std::mem::discriminant(&entry.kind) {
                self.errors.push(SpeciesError::TypeClash {
                    name: entry.name.clone(),
                    expected: old.kind_name().into(),
                    found: entry.kind_name().into(),
                    span,
                });
                continue;
            }
            if let (Some(a), Some(b)) = (&old.ty, &entry.ty) {
                if a != b {
                    self.errors.push(SpeciesError::TypeClash {
                        name: entry.name.clone(),
                        expected: a.to_string(),
                        found: b.to_string(),
                        span,
                    });
                    continue;
                }
            }
            let is_final = old.is_final || entry.is_final;
            let take_new = match (old.status(), entry.status()) {
                (_, Status::DeclaredOnly) => false,
                (Status::DeclaredOnly, _) => true,
                _ => old.body_origin() != entry.body_origin(),
            };
            if take_new && old.is_final && old.status() == Status::Defined {
                self.errors.push(SpeciesError::FinalViolation { name: entry.name.clone(), span });
                continue;
            }
            let mut chosen = if take_new { entry } else { old.clone() };
            chosen.is_final = is_final;
            self.flat.insert(chosen);
        }
    }

    fn elaborate(&mut self, t: &TypeExpr) -> Option<Ty> {
        let names = &self.carrier_names;
        match elaborate_type(t, &|n| names.contains(n)) {
            Ok(ty) => Some(ty),
            Err((name, span)) => {
                self.errors.push(SpeciesError::UnboundName { name, span });
                None
            }
        }
    }

    /// Type of a let when every parameter and the result are annotated.
    fn annotated_type(&mut self, params: &[Param], ret: Option<&TypeExpr>) -> Option<Ty> {
        let mut args = Vec::new();
        let mut complete = true;
        for p in params {
            match &p.ty {
                Some(t) => args.push(self.elaborate(t)?),
                None => complete = false,
            }
        }
        let ret = self.elaborate(ret?)?;
        complete.then(|| Ty::fun(args, ret))
    }

    fn check_type(&mut self, name: &Ident, old: Option<&Ty>, new: Option<Ty>) -> Option<Ty> {
        match (old, new) {
            (Some(a), Some(b)) if *a != b => {
                self.errors.push(SpeciesError::TypeClash {
                    name: name.name.clone(),
                    expected: a.to_string(),
                    found: b.to_string(),
                    span: name.span,
                });
                None
            }
            (Some(a), _) => Some(a.clone()),
            (None, b) => b,
        }
    }

    fn existing_kind(&mut self, name: &Ident, want: &'static str) -> Option<MethodEntry> {
        let old = self.flat.get(&name.name)?.clone();
        if old.kind_name() != want {
            self.errors.push(SpeciesError::TypeClash {
                name: name.name.clone(),
                expected: old.kind_name().into(),
                found: want.into(),
                span: name.span,
            });
        }
        Some(old)
    }

    fn define(&mut self, name: &Ident, want: &'static str, is_final: bool, ty: Option<Ty>, kind: EntryKind, span: Span) {
        let old = self.existing_kind(name, want);
        if let Some(old) = &old {
            if old.is_final && old.status() == Status::Defined {
                self.errors.push(SpeciesError::FinalViolation { name: name.name.clone(), span: name.span });
                return;
            }
        }
        let ty = self.check_type(name, old.as_ref().and_then(|o| o.ty.as_ref()), ty);
        let is_final = is_final || old.as_ref().is_some_and(|o| o.is_final);
        self.flat.insert(MethodEntry {
            name: name.name.clone(),
            kind,
            ty,
            origin: self.species.clone(),
            is_final,
            span,
        });
    }

    fn body(&mut self, methods: &[Method]) {
        // Declarations and definitions first, so that invalidation is known
        // before proofs given in this body are attached.
        for m in methods {
            match &m.kind {
                MethodKind::Signature { name, ty } => {
                    let ty = self.elaborate(ty);
                    match self.existing_kind(name, "function") {
                        Some(old) => {
                            let ty = self.check_type(name, old.ty.as_ref(), ty);
                            if let Some(e) = self.flat.get_mut(&name.name) {
                                e.ty = ty;
                            }
                        }
                        None => self.flat.insert(MethodEntry {
                            name: name.name.clone(),
                            kind: EntryKind::Function(None),
                            ty,
                            origin: self.species.clone(),
                            is_final: false,
                            span: m.span,
                        }),
                    }
                }
                MethodKind::Representation(ty) => {
                    self.elaborate(ty);
                    if let Carrier::Defined { ty: old, .. } = &self.flat.carrier {
                        if old != ty {
                            self.errors.push(SpeciesError::TypeClash {
                                name: "representation".into(),
                                expected: crate::syntax::printer::type_expr(old),
                                found: crate::syntax::printer::type_expr(ty),
                                span: m.span,
                            });
                        }
                    }
                    self.flat.carrier = Carrier::Defined { ty: ty.clone(), origin: self.species.clone() };
                }
                MethodKind::Let(def) => {
                    let ty = self.annotated_type(&def.params, def.ret.as_ref());
                    let fdef = FunctionDef {
                        params: def.params.clone(),
                        ret: def.ret.clone(),
                        body: def.body.clone(),
                        is_rec: def.is_rec,
                        termination: def.termination.clone(),
                    };
                    self.define(&def.name, "function", def.is_final, ty, EntryKind::Function(Some(fdef)), m.span);
                }
                MethodKind::Logical(def) => {
                    let args: Option<Vec<Ty>> =
                        def.params.iter().map(|p| p.ty.as_ref().and_then(|t| self.elaborate(t))).collect();
                    let ty = args.map(|a| Ty::fun(a, Ty::Prop));
                    let ldef = LogicalDef { params: def.params.clone(), body: def.body.clone() };
                    self.define(&def.name, "logical definition", def.is_final, ty, EntryKind::Logical(ldef), m.span);
                }
                MethodKind::Property { name, formula } | MethodKind::Theorem { name, formula, .. } => {
                    let is_theorem = matches!(m.kind, MethodKind::Theorem { .. });
                    if let Some(old) = self.existing_kind(name, "statement") {
                        let same = old.statement().is_some_and(|s| s.formula == *formula);
                        if !same {
                            self.errors.push(SpeciesError::TypeClash {
                                name: name.name.clone(),
                                expected: "the inherited statement".into(),
                                found: "a different formula".into(),
                                span: name.span,
                            });
                        }
                        continue;
                    }
                    self.flat.insert(MethodEntry {
                        name: name.name.clone(),
                        kind: EntryKind::Statement(Statement {
                            formula: formula.clone(),
                            is_theorem,
                            proof: None,
                            invalidated_by: None,
                        }),
                        ty: None,
                        origin: self.species.clone(),
                        is_final: false,
                        span: m.span,
                    });
                }
                MethodKind::ProofOf { .. } => {}
            }
        }
        self.invalidate();
        for m in methods {
            match &m.kind {
                MethodKind::Theorem { name, proof, .. } => self.attach(name, proof, m.span, true),
                MethodKind::ProofOf { name, proof } => self.attach(name, proof, m.span, false),
                _ => {}
            }
        }
    }

    /// Erase inherited proofs whose cited definitions are no longer the ones
    /// they were checked against.
    fn invalidate(&mut self) {
        let current: HashMap<String, Option<String>> =
            self.flat.entries.iter().map(|e| (e.name.clone(), e.def_origin().map(str::to_string))).collect();
        for e in &mut self.flat.entries {
            let EntryKind::Statement(st) = &mut e.kind else { continue };
            let Some(p) = &st.proof else { continue };
            let broken = p.def_deps.iter().find(|(name, origin)| {
                // Qualified definitions belong to parameters and cannot change here.
                !name.contains('!') && current.get(*name).cloned().flatten().as_deref() != Some(origin.as_str())
            });
            if let Some((name, _)) = broken {
                st.invalidated_by = Some(name.clone());
                st.proof = None;
            }
        }
    }

    fn attach(&mut self, name: &Ident, proof: &Proof, span: Span, is_theorem_decl: bool) {
        let current: HashMap<String, String> = self
            .flat
            .entries
            .iter()
            .filter_map(|e| e.def_origin().map(|o| (e.name.clone(), o.to_string())))
            .collect();
        let Some(entry) = self.flat.get_mut(&name.name) else {
            self.errors.push(SpeciesError::ProofOfUnknown { name: name.name.clone(), span: name.span });
            return;
        };
        let EntryKind::Statement(st) = &mut entry.kind else {
            self.errors.push(SpeciesError::ProofOfUnknown { name: name.name.clone(), span: name.span });
            return;
        };
        if st.proof.is_some() && !is_theorem_decl {
            self.errors.push(SpeciesError::AlreadyProved { name: name.name.clone(), span: name.span });
            return;
        }
        let d = deps::analyze(proof);
        let def_deps = d
            .def_deps
            .iter()
            .map(|n| (n.clone(), current.get(n).cloned().unwrap_or_default()))
            .collect();
        st.proof = Some(ProofInfo {
            proof: proof.clone(),
            origin: self.species.clone(),
            def_deps,
            decl_deps: d.decl_deps,
            span,
        });
        st.invalidated_by = None;
    }

    fn check_cycles(&mut self, span: Span) {
        let graph: HashMap<&str, Vec<&str>> = self
            .flat
            .statements()
            .filter_map(|(e, s)| {
                let p = s.proof.as_ref()?;
                Some((e.name.as_str(), p.decl_deps.iter().map(String::as_str).collect()))
            })
            .collect();
        let mut state: HashMap<&str, u8> = HashMap::new();
        let mut names: Vec<&str> = graph.keys().copied().collect();
        names.sort();
        for start in names {
            let mut path = Vec::new();
            if let Some(cycle) = dfs(start, &graph, &mut state, &mut path) {
                let span = self.flat.get(cycle[0].as_str()).map(|e| e.span).unwrap_or(span);
                self.errors.push(SpeciesError::CircularProof { names: cycle, span });
                return;
            }
        }
    }
}

fn dfs<'a>(
    node: &'a str,
    graph: &HashMap<&'a str, Vec<&'a str>>,
    state: &mut HashMap<&'a str, u8>,
    path: &mut Vec<&'a str>,
) -> Option<Vec<String>> {
    match state.get(node) {
        Some(2) => return None,
        Some(1) => {
            let at = path.iter().position(|n| *n == node).unwrap_or(0);
            let mut cycle: Vec<String> = path[at..].iter().map(|s| s.to_string()).collect();
            cycle.push(node.to_string());
            return Some(cycle);
        }
        _ => {}
    }
    state.insert(node, 1);
    path.push(node);
    for next in graph.get(node).into_iter().flatten() {
        if graph.contains_key(next) {
            if let Some(c) = dfs(next, graph, state, path) {
                return Some(c);
            }
        }
    }
    path.pop();
    state.insert(node, 2);
    None
}

/// Apply a parameter renaming to every type and body of a flattened species.
pub fn rename_flat(flat: &FlatSpecies, map: &HashMap<String, String>) -> FlatSpecies {
    let mut out = flat.clone();
    if map.iter().all(|(k, v)| k == v) {
        return out;
    }
    let r = Renaming(map);
    if let Carrier::Defined { ty, .. } = &mut out.carrier {
        r.ty(ty);
    }
    out.params.clear();
    for e in &mut out.entries {
        e.ty = e.ty.as_ref().map(|t| t.rename_carriers(map));
        match &mut e.kind {
            EntryKind::Function(def) => {
                if let Some(def) = def {
                    r.params(&mut def.params);
                    if let Some(t) = &mut def.ret {
                        r.ty(t);
                    }
                    r.expr(&mut def.body);
                }
            }
            EntryKind::Logical(def) => {
                r.params(&mut def.params);
                r.formula(&mut def.body);
            }
            EntryKind::Statement(st) => {
                r.formula(&mut st.formula);
                if let Some(p) = &mut st.proof {
                    r.proof(&mut p.proof);
                    p.def_deps = std::mem::take(&mut p.def_deps)
                        .into_iter()
                        .map(|(n, o)| (rename_qualified(&n, map), o))
                        .collect();
                    p.decl_deps = std::mem::take(&mut p.decl_deps).into_iter().map(|n| rename_qualified(&n, map)).collect();
                }
            }
        }
    }
    out
}

fn rename_qualified(name: &str, map: &HashMap<String, String>) -> String {
    match name.split_once('!') {
        Some((q, m)) => match map.get(q) {
            Some(nq) => format!("{nq}!{m}"),
            None => name.to_string(),
        },
        None => name.to_string(),
    }
}
