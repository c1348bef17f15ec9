use std::collections::BTreeSet;

use crate::kernel::Formula;

pub const MAX_ORACLE_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("formula has {0} atoms, more than {MAX_ORACLE_ATOMS}")]
    TooManyAtoms(usize),
    #[error("formula is not quantifier-free")]
    Quantified,
}

fn atoms(f: &Formula, out: &mut BTreeSet<Formula>) -> Result<(), OracleError> {
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Atom(_) | Formula::Eq(..) => {
            out.insert(f.clone());
            Ok(())
        }
        Formula::Not(a) => atoms(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            atoms(a, out)?;
            atoms(b, out)
        }
        Formula::All(..) | Formula::Ex(..) => Err(OracleError::Quantified),
    }
}

fn eval(f: &Formula, atoms: &[Formula], bits: u32) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(_) | Formula::Eq(..) => {
            let i = atoms.iter().position(|a| a == f).expect("collected");
            bits >> i & 1 == 1
        }
        Formula::Not(a) => !eval(a, atoms, bits),
        Formula::And(a, b) => eval(a, atoms, bits) && eval(b, atoms, bits),
        Formula::Or(a, b) => eval(a, atoms, bits) || eval(b, atoms, bits),
        Formula::Implies(a, b) => !eval(a, atoms, bits) || eval(b, atoms, bits),
        Formula::Iff(a, b) => eval(a, atoms, bits) == eval(b, atoms, bits),
        Formula::All(..) | Formula::Ex(..) => unreachable!(),
    }
}

/// Truth-table check. Atoms and equations are opaque propositional letters.
pub fn propositional_taut(f: &Formula) -> Result<bool, OracleError> {
    let mut set = BTreeSet::new();
    atoms(f, &mut set)?;
    if set.len() > MAX_ORACLE_ATOMS {
        return Err(OracleError::TooManyAtoms(set.len()));
    }
    let atoms: Vec<Formula> = set.into_iter().collect();
    Ok((0..1u32 << atoms.len()).all(|bits| eval(f, &atoms, bits)))
}
