use std::sync::Arc;

use crate::syntax::ast::{CollectionDecl, SpeciesDecl};

use super::env::{Collection, Env, SpeciesInfo};
use super::error::SpeciesError;
use super::flat::{flatten, Carrier, EntryKind, Status};
use super::typecheck::typecheck;
use super::types::elaborate_type;

/// Freeze `implement S(args)` into a collection. Every function must be
/// defined, every statement proved and the carrier represented.
pub fn make_collection(decl: &CollectionDecl, env: &Env) -> Result<Collection, Vec<SpeciesError>> {
    let name = decl.name.name.clone();
    if env.collections.contains_key(&decl.implements.name.name) {
        return Err(vec![SpeciesError::InheritFromCollection {
            name: decl.implements.name.name.clone(),
            span: decl.implements.name.span,
        }]);
    }
    let synthetic = SpeciesDecl {
        name: decl.name.clone(),
        params: vec![],
        inherits: vec![decl.implements.clone()],
        methods: vec![],
        span: decl.span,
    };
    let flat = flatten(&synthetic, env)?;
    let mut errors = Vec::new();
    let missing: Vec<String> = flat
        .entries
        .iter()
        .filter(|e| e.status() == Status::DeclaredOnly)
        .map(|e| e.name.clone())
        .collect();
    if !missing.is_empty() {
        errors.push(SpeciesError::IncompleteSpecies { collection: name.clone(), missing, span: decl.span });
    }
    let carrier = match &flat.carrier {
        Carrier::Defined { ty, .. } => {
            let names = env.collection_names();
            match elaborate_type(ty, &|n| names.contains(n)) {
                Ok(t) => Some(t),
                Err((n, span)) => {
                    errors.push(SpeciesError::UnboundName { name: n, span });
                    None
                }
            }
        }
        Carrier::Declared => {
            errors.push(SpeciesError::CarrierUndefined { collection: name.clone(), span: decl.span });
            None
        }
    };
    if !errors.is_empty() {
        return Err(errors);
    }
    let typed = typecheck(&flat, env)?;
    debug_assert!(flat.entries.iter().all(|e| !matches!(e.kind, EntryKind::Function(None))));
    Ok(Collection {
        name,
        species: SpeciesInfo { flat, typed: Arc::new(typed) },
        carrier: carrier.expect("checked above"),
    })
}
