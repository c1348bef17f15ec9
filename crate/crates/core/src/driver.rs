//! Running the whole pipeline over source files.

use std::collections::BTreeSet;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::checker::{check_species, CheckError, TheoremReport, Verdict};
use crate::eval::{eval_expr, EvalBudget, Value};
use crate::prover::SearchBudget;
use crate::species::{self, make_collection, EntryKind, Env, SpeciesError};
use crate::syntax::ast::Phrase;
use crate::syntax::{line_col, parse_expr, parse_source, print_unit, ParseError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub name: String,
    pub text: String,
}

impl Source {
    pub fn new(name: impl Into<String>, text: impl Into<String>) -> Source {
        Source { name: name.into(), text: text.into() }
    }
}

macro_rules! corpus_files {
    ($($f:literal),* $(,)?) => {
        &[$(($f, include_str!(concat!("../../../corpus/", $f)))),*]
    };
}

const CORPUS: &[(&str, &str)] = corpus_files!(
    "basic_object.fcl",
    "setoid.fcl",
    "int_setoid.fcl",
    "binary_relations.fcl",
    "relations.fcl",
    "functions.fcl",
    "finite_parts.fcl",
    "collections.fcl",
);

/// The bundled library, in load order.
pub fn corpus() -> Vec<Source> {
    CORPUS.iter().map(|(n, t)| Source::new(format!("corpus/{n}"), *t)).collect()
}

/// Read files in the given order. A directory contributes the files listed
/// in its `index.txt`, or else its `.fcl` files sorted by name.
pub fn read_sources(paths: &[PathBuf]) -> io::Result<Vec<Source>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            for f in directory_files(p)? {
                out.push(read_one(&f)?);
            }
        } else {
            out.push(read_one(p)?);
        }
    }
    Ok(out)
}

fn read_one(p: &Path) -> io::Result<Source> {
    let text = std::fs::read_to_string(p).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", p.display())))?;
    Ok(Source::new(p.display().to_string(), text))
}

fn directory_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let index = dir.join("index.txt");
    if index.is_file() {
        let text = std::fs::read_to_string(&index)?;
        return Ok(text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| dir.join(l))
            .collect());
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "fcl"))
        .collect();
    files.sort();
    Ok(files)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
    pub step: Option<String>,
}

impl Diagnostic {
    fn at(severity: Severity, code: &str, src: &Source, span: Span, message: String) -> Diagnostic {
        let (line, col) = line_col(&src.text, span.start);
        Diagnostic { severity, code: code.into(), file: src.name.clone(), line, col, message, step: None }
    }

    pub fn to_json(&self) -> String {
        json!({
            "severity": self.severity.to_string(),
            "code": self.code,
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "message": self.message,
            "step": self.step,
        })
        .to_string()
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}[{}]: {}", self.file, self.line, self.col, self.severity, self.code, self.message)?;
        if let Some(s) = &self.step {
            write!(f, " (step {s})")?;
        }
        Ok(())
    }
}

pub fn parse_code(e: &ParseError) -> &'static str {
    match e {
        ParseError::Lex(_) => "E-LEX",
        ParseError::Syntax { .. } => "E-SYNTAX",
        ParseError::UnterminatedSpecies { .. } => "E-UNTERMINATED",
        ParseError::Duplicate { .. } => "E-DUPLICATE",
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub budget: SearchBudget,
    pub jobs: usize,
    /// Run the proof checker; without it proofs are taken on trust.
    pub prove: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { budget: SearchBudget::default(), jobs: 1, prove: true }
    }
}

/// Everything learned from one run over a list of sources.
#[derive(Debug, Default)]
pub struct Session {
    pub env: Env,
    /// Species and collections that elaborated, in order.
    pub declared: Vec<String>,
    pub reports: Vec<TheoremReport>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Session {
    pub fn run(sources: &[Source], opts: &Options) -> Session {
        let mut s = Session::default();
        for src in sources {
            match parse_source(&src.text) {
                Ok(unit) => {
                    for p in &unit.phrases {
                        s.phrase(src, p, opts);
                    }
                }
                Err(e) => s.diagnostics.push(Diagnostic::at(Severity::Error, parse_code(&e), src, e.span(), e.to_string())),
            }
        }
        s
    }

    fn species_errors(&mut self, src: &Source, errs: Vec<SpeciesError>) {
        for e in errs {
            let sev = if e.is_warning() { Severity::Warning } else { Severity::Error };
            self.diagnostics.push(Diagnostic::at(sev, e.code(), src, e.span(), e.to_string()));
        }
    }

    fn phrase(&mut self, src: &Source, p: &Phrase, opts: &Options) {
        match p {
            Phrase::Species(d) => {
                let name = d.name.name.clone();
                let mut info = match species::elaborate(d, &self.env) {
                    Ok(e) => {
                        self.species_errors(src, e.warnings);
                        e.info
                    }
                    Err(errs) => return self.species_errors(src, errs),
                };
                if opts.prove {
                    let check = check_species(&info, &self.env, &opts.budget, opts.jobs);
                    for e in &check.errors {
                        self.diagnostics.push(check_diagnostic(src, &name, e));
                    }
                    // Statements whose proofs failed stay declared only, so
                    // descendants and collections cannot rely on them.
                    for r in &check.reports {
                        if r.verdict() == Verdict::Failed {
                            if let Some(EntryKind::Statement(st)) = info.flat.get_mut(&r.name).map(|e| &mut e.kind) {
                                st.proof = None;
                            }
                        }
                    }
                    self.reports.extend(check.reports);
                }
                self.env.species.insert(name.clone(), info);
                self.declared.push(name);
            }
            Phrase::Collection(c) => match make_collection(c, &self.env) {
                Ok(coll) => {
                    self.env.collections.insert(c.name.name.clone(), coll);
                    self.declared.push(c.name.name.clone());
                }
                Err(errs) => self.species_errors(src, errs),
            },
        }
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }

    /// Report lines for every checked theorem, in declaration order.
    pub fn report_lines(&self, timings: bool) -> Vec<String> {
        self.reports.iter().flat_map(|r| r.lines(timings)).collect()
    }

    pub fn report(&self, species: &str, theorem: &str) -> Option<&TheoremReport> {
        self.reports.iter().find(|r| r.species == species && r.name == theorem)
    }

    /// Dependency edges of the proofs written in each species, sorted within
    /// a species.
    pub fn dependency_edges(&self) -> Vec<String> {
        let mut out = Vec::new();
        for name in &self.declared {
            let Some(info) = self.env.species.get(name) else { continue };
            let mut edges = BTreeSet::new();
            for (e, st) in info.flat.statements() {
                let Some(p) = &st.proof else { continue };
                if p.origin != *name {
                    continue;
                }
                edges.extend(p.def_deps.keys().map(|d| format!("{name}.{} -> def:{d}", e.name)));
                edges.extend(p.decl_deps.iter().map(|d| format!("{name}.{} -> decl:{d}", e.name)));
            }
            out.extend(edges);
        }
        out
    }

    /// Parse, typecheck and run an expression inside a collection.
    pub fn eval(&self, collection: &str, text: &str, budget: EvalBudget) -> Result<Value, Diagnostic> {
        let src = Source::new("<expr>", text);
        if !self.env.collections.contains_key(collection) {
            return Err(Diagnostic::at(Severity::Error, "E-UNKNOWN-COLLECTION", &src, Span::new(0, 0), format!("unknown collection `{collection}`")));
        }
        let e = parse_expr(text).map_err(|e| Diagnostic::at(Severity::Error, parse_code(&e), &src, e.span(), e.to_string()))?;
        let te = species::typecheck_expr(&e, collection, &self.env).map_err(|errs| {
            let e = &errs[0];
            Diagnostic::at(Severity::Error, e.code(), &src, e.span(), e.to_string())
        })?;
        eval_expr(&self.env, collection, &te, budget).map_err(|e| Diagnostic::at(Severity::Error, e.code(), &src, Span::new(0, 0), e.to_string()))
    }
}

fn check_diagnostic(src: &Source, species: &str, e: &CheckError) -> Diagnostic {
    let mut d = Diagnostic::at(Severity::Error, e.kind.code(), src, e.span, format!("{species}.{}: {}", e.theorem, e.kind));
    d.step = Some(e.label.clone());
    d
}

/// Pretty-print a source file.
pub fn format_source(src: &Source) -> Result<String, Diagnostic> {
    parse_source(&src.text)
        .map(|u| print_unit(&u))
        .map_err(|e| Diagnostic::at(Severity::Error, parse_code(&e), src, e.span(), e.to_string()))
}
