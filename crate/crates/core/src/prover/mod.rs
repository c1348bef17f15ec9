//! Bounded tableau prover for first-order logic with equality.

mod egraph;
mod oracle;
mod rewrite;
mod tableau;

use std::fmt;
use std::time::Duration;

use crate::kernel::Formula;

pub use oracle::{propositional_taut, OracleError, MAX_ORACLE_ATOMS};
pub use rewrite::preprocess;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub name: String,
    pub formula: Formula,
    /// Comes from `definition of`; may be used to rewrite the other formulas.
    pub definitional: bool,
}

/// Named facts and a goal. Free variables are read as constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    pub facts: Vec<Fact>,
    pub goal: Formula,
}

impl Sequent {
    pub fn new(goal: Formula) -> Sequent {
        Sequent { facts: Vec::new(), goal }
    }

    pub fn fact(mut self, name: &str, formula: Formula) -> Sequent {
        self.facts.push(Fact { name: name.to_string(), formula, definitional: false });
        self
    }

    pub fn definition(mut self, name: &str, formula: Formula) -> Sequent {
        self.facts.push(Fact { name: name.to_string(), formula, definitional: true });
        self
    }

}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fact in &self.facts {
            writeln!(f, "{}: {}", fact.name, fact.formula)?;
        }
        write!(f, "|- {}", self.goal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub gamma_depth: u32,
    pub max_nodes: usize,
    pub timeout: Duration,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { gamma_depth: 3, max_nodes: 10_000, timeout: Duration::from_secs(5) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    GammaDepth,
    Nodes,
    Timeout,
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Limit::GammaDepth => "gamma depth",
            Limit::Nodes => "branch nodes",
            Limit::Timeout => "timeout",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    /// Instantiation rounds allowed in the successful attempt.
    pub gamma_depth: u32,
    pub branches: usize,
    pub instances: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProverOutcome {
    Proved(ProofTrace),
    /// Literals of an open, saturated branch.
    NotProved(Vec<String>),
    BudgetExceeded(Limit),
}

impl ProverOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProverOutcome::Proved(_))
    }
}

pub fn prove(s: &Sequent, budget: &SearchBudget) -> ProverOutcome {
    let facts = s.facts.iter().map(|f| (f.name.clone(), f.formula.clone(), f.definitional)).collect();
    let (facts, goal) = preprocess(facts, s.goal.clone());
    let facts: Vec<Formula> = facts.into_iter().map(|(_, f)| f).collect();
    let mut search = tableau::Search::new(budget);
    for limit in 1..=budget.gamma_depth.max(1) {
        match search.run(&facts, &goal, limit) {
            Ok(tableau::Res::Closed) => return ProverOutcome::Proved(search.trace(limit)),
            Ok(tableau::Res::Saturated(sample)) => return ProverOutcome::NotProved(sample),
            Ok(tableau::Res::RoundLimit) => {}
            Err(limit) => return ProverOutcome::BudgetExceeded(limit),
        }
    }
    ProverOutcome::BudgetExceeded(Limit::GammaDepth)
}
