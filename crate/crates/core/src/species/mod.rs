//! Species: flattening of inheritance and parameters, typing, termination
//! and collections.

pub mod collection;
pub mod deps;
pub mod env;
pub mod error;
pub mod flat;
pub mod interface;
pub mod rename;
pub mod termination;
pub mod typecheck;
pub mod typed;
pub mod types;

pub use collection::make_collection;
pub use deps::{analyze as analyze_dependencies, Dependencies};
pub use env::{Collection, Env, SpeciesInfo};
pub use error::SpeciesError;
pub use flat::{flatten, Carrier, EntryKind, FlatSpecies, MethodEntry, Status};
pub use interface::{interface_of, Interface};
pub use termination::check_termination;
pub use typecheck::{typecheck, typecheck_expr};
pub use types::Ty;

use std::sync::Arc;

use crate::syntax::ast::SpeciesDecl;

/// Result of elaborating one species declaration.
#[derive(Clone, Debug)]
pub struct Elaborated {
    pub info: SpeciesInfo,
    pub warnings: Vec<SpeciesError>,
}

/// Flatten, termination-check and typecheck a species. Inferred method types
/// are recorded in the flattened form so that descendants and interfaces
/// see them.
pub fn elaborate(decl: &SpeciesDecl, env: &Env) -> Result<Elaborated, Vec<SpeciesError>> {
    let mut flat = flatten(decl, env)?;
    // Structural termination is syntactic and runs first, so an ill-founded
    // definition is reported as such even when its type is also unclear.
    let mut errors = Vec::new();
    for e in &flat.entries {
        if let EntryKind::Function(Some(def)) = &e.kind {
            if def.is_rec && e.origin == flat.name {
                let letdef = crate::syntax::ast::LetDef {
                    name: crate::syntax::ast::Ident::new(e.name.clone(), e.span),
                    params: def.params.clone(),
                    ret: def.ret.clone(),
                    body: def.body.clone(),
                    is_rec: true,
                    is_final: e.is_final,
                    termination: def.termination.clone(),
                };
                if let Err(err) = check_termination(&letdef) {
                    errors.push(err);
                }
            }
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    let typed = typecheck(&flat, env)?;
    errors.extend(termination::check_call_graph(&typed));
    if !errors.is_empty() {
        return Err(errors);
    }
    for e in &mut flat.entries {
        if e.ty.is_none() {
            e.ty = typed.types.get(&e.name).cloned();
        }
    }
    let warnings = termination::non_exhaustive_matches(&typed)
        .into_iter()
        .filter(|w| match w {
            SpeciesError::NonExhaustiveMatch { function, .. } => {
                flat.get(function).is_some_and(|e| e.origin == flat.name)
            }
            _ => true,
        })
        .collect();
    Ok(Elaborated { info: SpeciesInfo { flat, typed: Arc::new(typed) }, warnings })
}
