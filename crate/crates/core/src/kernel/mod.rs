//! Kernel formulas: resolved names, sorted binders, substitution,
//! definitional axioms and list induction.

pub mod induction;
pub mod term;
pub mod translate;

use thiserror::Error;

pub use induction::{induction_scheme, induction_scheme_with, InductionScheme};
pub use term::{fresh_name, Formula, Sort, Term};
pub use translate::{formula, unfold_definition, DefAxiom, View};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("`{0}` has no definition")]
    NotDefined(String),
    #[error("substituting `{var}`: expected {expected}, found {found}")]
    TypeMismatch { var: String, expected: String, found: String },
    #[error("not a goal over lists: {0}")]
    NotInductiveGoal(String),
    #[error("unsupported in formulas: {0}")]
    Unsupported(String),
}
