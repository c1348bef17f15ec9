use std::collections::{BTreeSet, HashMap};

use super::term::{fresh_name, Formula, Sort, Term};
use super::KernelError;

/// Structural induction on lists for a goal `all l : list(T), P(l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InductionScheme {
    pub var: String,
    pub elem: Sort,
    /// `P([])`.
    pub base: Formula,
    pub head: String,
    pub tail: String,
    /// Name given to the hypothesis of the step case.
    pub hypothesis_name: String,
    /// `P(t)`.
    pub hypothesis: Formula,
    /// `P(h :: t)`.
    pub step: Formula,
}

/// Scheme with fresh names `h` and `t` (or variants of them).
pub fn induction_scheme(goal: &Formula) -> Result<InductionScheme, KernelError> {
    let mut avoid = BTreeSet::new();
    goal.names(&mut avoid);
    let h = fresh_name("h", &avoid);
    avoid.insert(h.clone());
    let t = fresh_name("t", &avoid);
    induction_scheme_with(goal, &h, &t)
}

/// Scheme with the given names for the head and tail of the step case.
/// The names must not occur free in the goal.
pub fn induction_scheme_with(goal: &Formula, head: &str, tail: &str) -> Result<InductionScheme, KernelError> {
    let Formula::All(l, Sort::List(elem), body) = goal else {
        return Err(KernelError::NotInductiveGoal(goal.to_string()));
    };
    let free = goal.free_vars();
    if head == tail || free.contains_key(head) || free.contains_key(tail) {
        return Err(KernelError::NotInductiveGoal(format!("names `{head}`, `{tail}` clash with the goal")));
    }
    let list = Sort::List(elem.clone());
    let at = |t: Term| body.subst_unchecked(&HashMap::from([(l.clone(), t)]));
    let hv = Term::Var(head.to_string(), (**elem).clone());
    let tv = Term::Var(tail.to_string(), list);
    Ok(InductionScheme {
        var: l.clone(),
        elem: (**elem).clone(),
        base: at(Term::Nil((**elem).clone())),
        head: head.to_string(),
        tail: tail.to_string(),
        hypothesis_name: "HI".into(),
        hypothesis: at(tv.clone()),
        step: at(Term::cons(hv, tv)),
    })
}

impl InductionScheme {
    /// The step case as a closed-over statement:
    /// `all t, all h, P(t) -> P(h :: t)`.
    pub fn step_statement(&self) -> Formula {
        Formula::all(
            &self.tail,
            Sort::list(self.elem.clone()),
            Formula::all(&self.head, self.elem.clone(), Formula::implies(self.hypothesis.clone(), self.step.clone())),
        )
    }
}
