//! Checking hierarchical proofs.

mod obligations;

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::prover::{prove, ProverOutcome, SearchBudget};
use crate::species::{Env, SpeciesInfo};
use crate::syntax::Span;

pub use obligations::{obligations_of, plan_species, unbound_names, Obligation, PlanItem, TheoremPlan};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CheckErrorKind {
    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),
    #[error("step {0} is not in scope")]
    StepOutOfScope(String),
    #[error("`{0}` has no definition that can be cited")]
    CitesUnprovenDefinition(String),
    #[error("unknown property or theorem `{0}`")]
    UnknownName(String),
    #[error("obligation not proved: {0}")]
    ObligationFailed(String),
    #[error("induction case does not match: expected `{expected}`, found `{found}`")]
    CaseMismatch { expected: String, found: String },
    #[error("induction case `{0}` is missing")]
    MissingCase(String),
    #[error("proof block has no terminal step")]
    MissingQed,
    #[error("proof invalidated by the redefinition of `{0}`")]
    Invalidated(String),
    #[error("{0}")]
    Kernel(String),
}

impl CheckErrorKind {
    pub fn code(&self) -> &'static str {
        match self {
            CheckErrorKind::UnknownHypothesis(_) => "E-UNKNOWN-HYPOTHESIS",
            CheckErrorKind::StepOutOfScope(_) => "E-STEP-SCOPE",
            CheckErrorKind::CitesUnprovenDefinition(_) => "E-UNPROVEN-DEFINITION",
            CheckErrorKind::UnknownName(_) => "E-UNKNOWN-NAME",
            CheckErrorKind::ObligationFailed(_) => "E-OBLIGATION",
            CheckErrorKind::CaseMismatch { .. } => "E-CASE-MISMATCH",
            CheckErrorKind::MissingCase(_) => "E-MISSING-CASE",
            CheckErrorKind::MissingQed => "E-MISSING-QED",
            CheckErrorKind::Invalidated(_) => "E-INVALIDATED",
            CheckErrorKind::Kernel(_) => "E-KERNEL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckError {
    pub theorem: String,
    pub label: String,
    pub kind: CheckErrorKind,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepVerdict {
    Proved,
    Failed,
    Budget,
}

impl fmt::Display for StepVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepVerdict::Proved => "PROVED",
            StepVerdict::Failed => "FAILED",
            StepVerdict::Budget => "BUDGET",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StepResult {
    pub label: String,
    pub verdict: StepVerdict,
    pub elapsed: Duration,
    pub outcome: Option<ProverOutcome>,
}

#[derive(Clone, Debug)]
pub enum TheoremStatus {
    Checked(Vec<StepResult>),
    Inherited(String),
    Invalidated(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Proved,
    Failed,
    Unproved,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Proved => "PROVED",
            Verdict::Failed => "FAILED",
            Verdict::Unproved => "UNPROVED",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub species: String,
    pub name: String,
    pub status: TheoremStatus,
}

impl TheoremReport {
    pub fn verdict(&self) -> Verdict {
        match &self.status {
            TheoremStatus::Checked(steps) if steps.iter().all(|s| s.verdict == StepVerdict::Proved) => Verdict::Proved,
            TheoremStatus::Checked(_) => Verdict::Failed,
            TheoremStatus::Inherited(_) => Verdict::Proved,
            TheoremStatus::Invalidated(_) => Verdict::Unproved,
        }
    }

    /// Report lines; elapsed times are printed only when asked for.
    pub fn lines(&self, timings: bool) -> Vec<String> {
        let head = format!("THEOREM {}.{}", self.species, self.name);
        match &self.status {
            TheoremStatus::Checked(steps) => steps
                .iter()
                .map(|s| {
                    let t = if timings { s.elapsed.as_millis().to_string() } else { "-".into() };
                    format!("{head} {} {} {t}", s.label, s.verdict)
                })
                .collect(),
            TheoremStatus::Inherited(_) => vec![format!("{head} inherited PROVED -")],
            TheoremStatus::Invalidated(_) => vec![format!("{head} invalidated UNPROVED -")],
        }
    }

    pub fn step(&self, label: &str) -> Option<&StepResult> {
        match &self.status {
            TheoremStatus::Checked(steps) => steps.iter().find(|s| s.label == label),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SpeciesCheck {
    pub reports: Vec<TheoremReport>,
    pub errors: Vec<CheckError>,
}

impl SpeciesCheck {
    pub fn report(&self, name: &str) -> Option<&TheoremReport> {
        self.reports.iter().find(|r| r.name == name)
    }
}

fn discharge(o: &Obligation, budget: &SearchBudget) -> (ProverOutcome, Duration) {
    let start = Instant::now();
    let out = if o.by_induction {
        ProverOutcome::Proved(crate::prover::ProofTrace { gamma_depth: 0, branches: 0, instances: 0 })
    } else {
        prove(&o.sequent, budget)
    };
    (out, start.elapsed())
}

/// Check every proof given in a species. With `jobs > 1` obligations are
/// discharged on a thread pool; the report order does not depend on it.
pub fn check_species(info: &SpeciesInfo, env: &Env, budget: &SearchBudget, jobs: usize) -> SpeciesCheck {
    let plans = plan_species(info, env);
    let tasks: Vec<&Obligation> = plans
        .iter()
        .flat_map(|p| match p {
            TheoremPlan::Check { items, .. } => items.as_slice(),
            _ => &[],
        })
        .filter_map(|i| match i {
            PlanItem::Obligation(o) => Some(o),
            PlanItem::Error(_) => None,
        })
        .collect();
    let results: Vec<(ProverOutcome, Duration)> = if jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| tasks.par_iter().map(|o| discharge(o, budget)).collect()),
            Err(_) => tasks.iter().map(|o| discharge(o, budget)).collect(),
        }
    } else {
        tasks.iter().map(|o| discharge(o, budget)).collect()
    };
    let mut results = results.into_iter();
    let mut out = SpeciesCheck::default();
    let species = info.flat.name.clone();
    for plan in plans {
        let status = match plan {
            TheoremPlan::Inherited { name, origin } => {
                out.reports.push(TheoremReport { species: species.clone(), name, status: TheoremStatus::Inherited(origin) });
                continue;
            }
            TheoremPlan::Invalidated { name, by, span } => {
                out.errors.push(CheckError { theorem: name.clone(), label: "invalidated".into(), kind: CheckErrorKind::Invalidated(by.clone()), span });
                out.reports.push(TheoremReport { species: species.clone(), name, status: TheoremStatus::Invalidated(by) });
                continue;
            }
            TheoremPlan::Check { name, items } => {
                let mut steps = Vec::new();
                for item in items {
                    match item {
                        PlanItem::Obligation(o) => {
                            let (outcome, elapsed) = results.next().expect("one result per obligation");
                            let verdict = match &outcome {
                                ProverOutcome::Proved(_) => StepVerdict::Proved,
                                ProverOutcome::NotProved(_) => StepVerdict::Failed,
                                ProverOutcome::BudgetExceeded(_) => StepVerdict::Budget,
                            };
                            if verdict != StepVerdict::Proved {
                                let detail = match &outcome {
                                    ProverOutcome::BudgetExceeded(l) => format!("{l} budget exhausted"),
                                    _ => "no proof found".into(),
                                };
                                out.errors.push(CheckError {
                                    theorem: name.clone(),
                                    label: o.label.clone(),
                                    kind: CheckErrorKind::ObligationFailed(detail),
                                    span: o.span,
                                });
                            }
                            steps.push(StepResult { label: o.label, verdict, elapsed, outcome: Some(outcome) });
                        }
                        PlanItem::Error(e) => {
                            steps.push(StepResult { label: e.label.clone(), verdict: StepVerdict::Failed, elapsed: Duration::ZERO, outcome: None });
                            out.errors.push(e);
                        }
                    }
                }
                (name, TheoremStatus::Checked(steps))
            }
        };
        out.reports.push(TheoremReport { species: species.clone(), name: status.0, status: status.1 });
    }
    out
}
