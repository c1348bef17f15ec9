pub mod syntax;
pub mod species;
pub mod kernel;
pub mod prover;
pub mod checker;
pub mod driver;
pub mod eval;
