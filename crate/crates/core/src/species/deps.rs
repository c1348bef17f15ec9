use std::collections::BTreeSet;

use crate::syntax::ast::*;

/// Names a proof relies on: `definition of` citations versus
/// property/theorem citations. Qualified names keep their `X!` prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Dependencies {
    pub def_deps: BTreeSet<String>,
    pub decl_deps: BTreeSet<String>,
}

pub fn analyze(proof: &Proof) -> Dependencies {
    let mut deps = Dependencies::default();
    collect(proof, &mut deps);
    deps
}

fn justification(j: &Justification, deps: &mut Dependencies) {
    if let Justification::By(c) = j {
        deps.def_deps.extend(c.definitions.iter().map(|n| n.to_string()));
        deps.decl_deps.extend(c.properties.iter().chain(&c.theorems).map(|n| n.to_string()));
    }
}

fn collect(proof: &Proof, deps: &mut Dependencies) {
    match proof {
        Proof::By(j) => justification(j, deps),
        Proof::Steps(steps) => {
            for s in steps {
                match &s.body {
                    StepBody::Prove { proof, .. } => collect(proof, deps),
                    StepBody::Qed(j) => justification(j, deps),
                }
            }
        }
    }
}

/// Every cited name in a proof together with its span, in source order.
pub fn citations(proof: &Proof) -> Vec<(&'static str, &Name)> {
    fn go<'a>(p: &'a Proof, out: &mut Vec<(&'static str, &'a Name)>) {
        let just = |j: &'a Justification, out: &mut Vec<(&'static str, &'a Name)>| {
            if let Justification::By(c) = j {
                out.extend(c.definitions.iter().map(|n| ("def", n)));
                out.extend(c.properties.iter().chain(&c.theorems).map(|n| ("decl", n)));
            }
        };
        match p {
            Proof::By(j) => just(j, out),
            Proof::Steps(steps) => {
                for s in steps {
                    match &s.body {
                        StepBody::Prove { proof, .. } => go(proof, out),
                        StepBody::Qed(j) => just(j, out),
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    go(proof, &mut out);
    out
}
