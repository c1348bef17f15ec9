use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::flat::FlatSpecies;
use super::typed::TypedSpecies;
use super::types::Ty;

/// A species that passed flattening and typechecking.
#[derive(Clone, Debug)]
pub struct SpeciesInfo {
    pub flat: FlatSpecies,
    pub typed: Arc<TypedSpecies>,
}

/// A frozen, fully defined species. Its carrier is only visible to its own
/// methods.
#[derive(Clone, Debug)]
pub struct Collection {
    pub name: String,
    pub species: SpeciesInfo,
    pub carrier: Ty,
}

/// Everything resolved so far, in declaration order.
#[derive(Clone, Debug, Default)]
pub struct Env {
    pub species: HashMap<String, SpeciesInfo>,
    pub collections: HashMap<String, Collection>,
}

impl Env {
    pub fn collection_names(&self) -> HashSet<String> {
        self.collections.keys().cloned().collect()
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.species.contains_key(name) || self.collections.contains_key(name)
    }
}
