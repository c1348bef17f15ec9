use thiserror::Error;

use crate::syntax::Span;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpeciesError {
    #[error("unknown species `{name}`")]
    UnknownSpecies { name: String, span: Span },
    #[error("unknown collection or parameter `{name}`")]
    UnknownCollection { name: String, span: Span },
    #[error("`{name}` is a collection and cannot be inherited from")]
    InheritFromCollection { name: String, span: Span },
    #[error("species `{species}` expects {expected} argument(s), found {found}")]
    ArityMismatch { species: String, expected: usize, found: usize, span: Span },
    #[error("`{arg}` does not implement the interface of parameter `{param}`: missing {}", missing.join(", "))]
    InterfaceMismatch { param: String, arg: String, missing: Vec<String>, span: Span },
    #[error("unsupported: {what}")]
    Unsupported { what: String, span: Span },
    #[error("redefinition of `{name}` changes its type from {expected} to {found}")]
    TypeClash { name: String, expected: String, found: String, span: Span },
    #[error("`{name}` is final and cannot be redefined")]
    FinalViolation { name: String, span: Span },
    #[error("`proof of {name}` does not complete any inherited statement")]
    ProofOfUnknown { name: String, span: Span },
    #[error("`{name}` is already proved and its proof is still valid")]
    AlreadyProved { name: String, span: Span },
    #[error("circular proof dependency through {}", names.join(" -> "))]
    CircularProof { names: Vec<String>, span: Span },
    #[error("type error: expected {expected}, found {found}")]
    TypeError { expected: String, found: String, span: Span },
    #[error("unbound name `{name}`")]
    UnboundName { name: String, span: Span },
    #[error("cannot infer the type of {what}")]
    AmbiguousType { what: String, span: Span },
    #[error("non-structural recursive call of `{function}`: {reason}")]
    NonStructural { function: String, reason: String, span: Span },
    #[error("collection `{collection}` is built on an incomplete species: {}", missing.join(", "))]
    IncompleteSpecies { collection: String, missing: Vec<String>, span: Span },
    #[error("collection `{collection}` has no representation for its carrier")]
    CarrierUndefined { collection: String, span: Span },
    #[error("unknown citation `{name}`")]
    UnknownCitation { name: String, span: Span },
    #[error("warning: non-exhaustive match in `{function}`")]
    NonExhaustiveMatch { function: String, span: Span },
}

impl SpeciesError {
    pub fn code(&self) -> &'static str {
        match self {
            SpeciesError::UnknownSpecies { .. } => "E-UNKNOWN-SPECIES",
            SpeciesError::UnknownCollection { .. } => "E-UNKNOWN-COLLECTION",
            SpeciesError::InheritFromCollection { .. } => "E-INHERIT-COLLECTION",
            SpeciesError::ArityMismatch { .. } => "E-ARITY",
            SpeciesError::InterfaceMismatch { .. } => "E-INTERFACE",
            SpeciesError::Unsupported { .. } => "E-UNSUPPORTED",
            SpeciesError::TypeClash { .. } => "E-TYPECLASH",
            SpeciesError::FinalViolation { .. } => "E-FINAL",
            SpeciesError::ProofOfUnknown { .. } => "E-PROOF-OF-UNKNOWN",
            SpeciesError::AlreadyProved { .. } => "E-ALREADY-PROVED",
            SpeciesError::CircularProof { .. } => "E-CIRCULAR",
            SpeciesError::TypeError { .. } => "E-TYPE",
            SpeciesError::UnboundName { .. } => "E-UNBOUND",
            SpeciesError::AmbiguousType { .. } => "E-AMBIGUOUS-TYPE",
            SpeciesError::NonStructural { .. } => "E-NONSTRUCTURAL",
            SpeciesError::IncompleteSpecies { .. } => "E-INCOMPLETE",
            SpeciesError::CarrierUndefined { .. } => "E-CARRIER-UNDEFINED",
            SpeciesError::UnknownCitation { .. } => "E-UNKNOWN-CITATION",
            SpeciesError::NonExhaustiveMatch { .. } => "W-NONEXHAUSTIVE",
        }
    }

    pub fn is_warning(&self) -> bool {
        matches!(self, SpeciesError::NonExhaustiveMatch { .. })
    }

    pub fn span(&self) -> Span {
        match self {
            SpeciesError::UnknownSpecies { span, .. }
            | SpeciesError::UnknownCollection { span, .. }
            | SpeciesError::InheritFromCollection { span, .. }
            | SpeciesError::ArityMismatch { span, .. }
            | SpeciesError::InterfaceMismatch { span, .. }
            | SpeciesError::Unsupported { span, .. }
            | SpeciesError::TypeClash { span, .. }
            | SpeciesError::FinalViolation { span, .. }
            | SpeciesError::ProofOfUnknown { span, .. }
            | SpeciesError::AlreadyProved { span, .. }
            | SpeciesError::CircularProof { span, .. }
            | SpeciesError::TypeError { span, .. }
            | SpeciesError::UnboundName { span, .. }
            | SpeciesError::AmbiguousType { span, .. }
            | SpeciesError::NonStructural { span, .. }
            | SpeciesError::IncompleteSpecies { span, .. }
            | SpeciesError::CarrierUndefined { span, .. }
            | SpeciesError::UnknownCitation { span, .. }
            | SpeciesError::NonExhaustiveMatch { span, .. } => *span,
        }
    }
}
