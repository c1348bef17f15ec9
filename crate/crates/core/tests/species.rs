mod common;

use common::*;
use foclite::species::{self, EntryKind, SpeciesError, Status};

fn codes(errs: &[SpeciesError]) -> Vec<&'static str> {
    errs.iter().map(|e| e.code()).collect()
}

#[test]
fn whole_corpus_elaborates() {
    let env = load(&corpus_source()).unwrap_or_else(|(n, e)| panic!("{n}: {e:?}"));
    assert!(env.collections.contains_key("IntFiniteParts"));
    assert_eq!(env.species.len(), 14);
}

#[test]
fn binary_relations_flattened() {
    let env = corpus_env();
    let flat = &env.species["Binary_relations"].flat;
    for name in ["element", "equal", "different", "same_is_not_different", "relation", "is_contained", "is_contained_spec"] {
        assert!(flat.get(name).is_some(), "{name} missing");
    }
    assert_eq!(flat.get("equal").unwrap().status(), Status::Defined);
    assert_eq!(flat.get("equal_reflexive").unwrap().status(), Status::Proved);
    assert_eq!(flat.get("relation").unwrap().status(), Status::DeclaredOnly);
    assert_eq!(flat.get("equal").unwrap().origin, "Binary_relations");
    assert_eq!(flat.get("different").unwrap().origin, "Setoid");
}

#[test]
fn single_signature_species() {
    let env = load("species S = signature f : Self -> int; end;;").unwrap();
    let flat = &env.species["S"].flat;
    assert_eq!(flat.entries.len(), 1);
    assert_eq!(flat.entries[0].status(), Status::DeclaredOnly);
}

const REDEFINE_EQUAL: &str = "
species Strict_relations (A is Setoid, B is Setoid) =
  inherit Binary_relations(A, B);
  let equal(x, y) = is_contained(x, y);
end;;";

#[test]
fn redefinition_erases_only_def_dependent_proofs() {
    let env = with_corpus(REDEFINE_EQUAL).unwrap();
    let flat = &env.species["Strict_relations"].flat;
    let spec = flat.get("equal_spec").unwrap();
    assert_eq!(spec.status(), Status::DeclaredOnly);
    assert_eq!(spec.statement().unwrap().invalidated_by.as_deref(), Some("equal"));
    for name in ["equal_reflexive", "equal_symmetric", "equal_transitive", "union_is_left_unique", "same_is_not_different"] {
        assert_eq!(flat.get(name).unwrap().status(), Status::Proved, "{name}");
    }
}

#[test]
fn redefinition_soundness_over_corpus() {
    // Redefine each defined function of each corpus species in a child and
    // check that no surviving proof depends on that definition.
    let base = corpus_env();
    let mut candidates = Vec::new();
    for (sname, info) in &base.species {
        if !info.flat.params.is_empty() && info.flat.params.len() != 2 {
            continue;
        }
        for e in &info.flat.entries {
            if let EntryKind::Function(Some(def)) = &e.kind {
                if !e.is_final && def.params.len() <= 2 && !def.is_rec {
                    candidates.push((sname.clone(), e.name.clone(), def.params.len(), info.flat.params.clone()));
                }
            }
        }
    }
    candidates.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    assert!(candidates.len() >= 3);
    for (sname, m, arity, params) in candidates {
        let formal: Vec<String> = params.iter().map(|p| format!("{} is {}", p.name, p.interface)).collect();
        let actual: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
        let (fp, ap) = if params.is_empty() {
            (String::new(), String::new())
        } else {
            (format!("({})", formal.join(", ")), format!("({})", actual.join(", ")))
        };
        let args: Vec<String> = (0..arity).map(|i| format!("x{i}")).collect();
        let body = base.species[&sname].flat.get(&m).unwrap().clone();
        let EntryKind::Function(Some(def)) = &body.kind else { unreachable!() };
        let printed = foclite::syntax::printer::expr(&def.body, 0);
        let renamed = def.params.iter().zip(&args).fold(printed, |acc, (p, a)| replace_word(&acc, &p.name.name, a));
        let head = if arity == 0 { m.clone() } else { format!("{m}({})", args.join(", ")) };
        let src = format!("species Mutant_{m} {fp} = inherit {sname}{ap}; let {head} = {renamed}; end;;");
        let env = with_corpus(&src).unwrap_or_else(|e| panic!("{src}: {e:?}"));
        let flat = &env.species[&format!("Mutant_{m}")].flat;
        for (e, st) in flat.statements() {
            if let Some(p) = &st.proof {
                assert!(!p.def_deps.contains_key(&m), "{}: {} still proved", m, e.name);
            }
        }
    }
}

fn replace_word(text: &str, from: &str, to: &str) -> String {
    let mut out = String::new();
    let mut word = String::new();
    for c in text.chars().chain(std::iter::once(' ')) {
        if c.is_alphanumeric() || c == '_' || c == '\'' {
            word.push(c);
        } else {
            out.push_str(if word == from { to } else { &word });
            word.clear();
            out.push(c);
        }
    }
    out.pop();
    out
}

#[test]
fn final_methods_cannot_be_redefined() {
    let src = "species Bad (A is Setoid, B is Setoid) = inherit Binary_relations(A, B);
      logical let is_full_r(r) = all a : A, relation(r, a, a); end;;";
    let (_, errs) = with_corpus(src).unwrap_err();
    assert_eq!(codes(&errs), ["E-FINAL"]);
}

#[test]
fn type_change_is_a_clash() {
    let src = "species Bad = inherit Setoid; signature equal : Self -> int; end;;";
    let (_, errs) = with_corpus(src).unwrap_err();
    assert_eq!(codes(&errs), ["E-TYPECLASH"]);
}

#[test]
fn unknown_parent_and_arity() {
    let (_, errs) = load("species S = inherit Nowhere; end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-UNKNOWN-SPECIES"]);
    let (_, errs) = with_corpus("species S (A is Setoid) = inherit Binary_relations(A); end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-ARITY"]);
}

#[test]
fn interface_mismatch_on_missing_method() {
    let src = "species Half = signature equal : Self -> Self -> bool; representation = int;
        let equal(x, y) = x = y; end;;
      collection HalfC = implement Half; end;;
      species R = inherit Binary_relations(HalfC, IntSetoid); end;;";
    let (name, errs) = with_corpus(src).unwrap_err();
    assert_eq!(name, "R");
    assert_eq!(codes(&errs), ["E-INTERFACE"]);
    match &errs[0] {
        SpeciesError::InterfaceMismatch { missing, .. } => assert!(missing.contains(&"element".to_string())),
        e => panic!("{e:?}"),
    }
    // The same species without `equal` at all.
    let src = "species NoEq = representation = int; let element = 0; end;;
      collection NoEqC = implement NoEq; end;;
      species R = inherit Binary_relations(NoEqC, IntSetoid); end;;";
    let (_, errs) = with_corpus(src).unwrap_err();
    match &errs[0] {
        SpeciesError::InterfaceMismatch { missing, .. } => assert!(missing.contains(&"equal".to_string())),
        e => panic!("{e:?}"),
    }
}

#[test]
fn interface_of_setoid_and_empty() {
    let env = corpus_env();
    let iface = species::interface_of(&env.species["Setoid"].flat);
    let mut names: Vec<&str> = iface.names().iter().map(String::as_str).collect();
    names.sort();
    assert_eq!(
        names,
        ["different", "element", "equal", "equal_reflexive", "equal_symmetric", "equal_transitive", "same_is_not_different"]
    );
    assert!(species::interface_of(&env.species["Basic_object"].flat).names().is_empty());
}

#[test]
fn interfaces_grow_along_inheritance() {
    let env = corpus_env();
    for info in env.species.values() {
        let child = species::interface_of(&info.flat);
        for parent in &info.flat.parents {
            let p = species::interface_of(&env.species[parent].flat);
            for n in p.names() {
                assert!(child.get(n).is_some(), "{} lacks {n} of {parent}", info.flat.name);
            }
        }
    }
}

#[test]
fn types_agree_along_inheritance() {
    let env = corpus_env();
    for info in env.species.values() {
        for parent in &info.flat.parents {
            let pflat = &env.species[parent].flat;
            for e in &pflat.entries {
                let mine = info.flat.get(&e.name).unwrap();
                if pflat.params.is_empty() {
                    assert_eq!(mine.ty, e.ty, "{}.{}", info.flat.name, e.name);
                }
            }
        }
    }
}

#[test]
fn typecheck_examples() {
    let env = corpus_env();
    let typed = &env.species["Functional_relations"].typed;
    assert!(typed.functions.contains_key("relation"));
    assert!(load("species S = signature f : Self -> Self; let f(x) = x; end;;").is_ok());
    let (_, errs) = load("species S = signature cardinal : Self -> int; let cardinal(x) = true; end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-TYPE"]);
    let (_, errs) = load("species S = signature p : Self -> bool; property q : all x : Self, p(x, x); end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-TYPE"]);
    let (_, errs) = load("species S = property q : all x : Self, p(x); end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-UNBOUND"]);
}

#[test]
fn mutated_cardinal_is_rejected() {
    let src = corpus_source().replace("| [] -> 0", "| [] -> false");
    let (name, errs) = load(&src).unwrap_err();
    assert_eq!(name, "Finite_parts_by_lists");
    assert!(codes(&errs).contains(&"E-TYPE"));
}

#[test]
fn logical_call_in_expression_is_rejected() {
    let src = "species S (A is Setoid, B is Setoid) = inherit Binary_relations(A, B);
      let lu(r) = is_left_unique(r) && true; end;;";
    let (_, errs) = with_corpus(src).unwrap_err();
    assert_eq!(codes(&errs), ["E-TYPE"]);
}

#[test]
fn termination_examples() {
    let env = corpus_env();
    let flat = &env.species["Finite_parts_by_lists"].flat;
    for name in ["belongs", "cardinal", "release"] {
        let EntryKind::Function(Some(def)) = &flat.get(name).unwrap().kind else { panic!() };
        assert!(def.is_rec);
    }
    let (_, errs) = load("species S = let rec f(l) = f(l) termination proof = structural l; end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-NONSTRUCTURAL"]);
    let (_, errs) = load(
        "species S = let rec f(l) = match l with | [] -> 0 | h :: t -> f(h :: t) termination proof = structural l; end;;",
    )
    .unwrap_err();
    assert_eq!(codes(&errs), ["E-NONSTRUCTURAL"]);
    // A tail of a tail is still smaller.
    assert!(load(
        "species S = let rec f(l : list(int)) = match l with | [] -> 0 | _ :: t -> (match t with | [] -> 1 | _ :: u -> f(u))
           termination proof = structural l; end;;"
    )
    .is_ok());
    // Shadowing the tail by a let hides it.
    let (_, errs) = load(
        "species S = let rec f(l) = match l with | [] -> 0 | _ :: t -> let t = l in f(t)
           termination proof = structural l; end;;",
    )
    .unwrap_err();
    assert_eq!(codes(&errs), ["E-NONSTRUCTURAL"]);
    let (_, errs) = load("species S = signature f : int -> int; let f(l) = f(l); end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-NONSTRUCTURAL"]);
    let (_, errs) = load("species S = signature f : int -> int; let f(l) = g(l); let g(l) = f(l); end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-NONSTRUCTURAL"]);
}

#[test]
fn proof_of_rules() {
    let (_, errs) = with_corpus("species S = inherit Setoid; proof of nothing = conclude; end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-PROOF-OF-UNKNOWN"]);
    let (_, errs) = with_corpus("species S = inherit Setoid; proof of same_is_not_different = conclude; end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-ALREADY-PROVED"]);
    let (_, errs) = with_corpus(
        "species S = inherit Setoid; proof of equal_reflexive = by property equal_symmetric;
           proof of equal_symmetric = by property equal_reflexive; end;;",
    )
    .unwrap_err();
    assert_eq!(codes(&errs), ["E-CIRCULAR"]);
}

#[test]
fn collections() {
    let env = corpus_env();
    assert!(env.collections["IntFiniteParts"].species.flat.get("belongs").is_some());
    let (_, errs) = with_corpus("collection Bad = implement Finite_parts(IntSetoid); end;;").unwrap_err();
    match &errs[0] {
        SpeciesError::IncompleteSpecies { missing, .. } => {
            for m in ["belongs", "cardinal", "release", "empty", "from_list"] {
                assert!(missing.contains(&m.to_string()), "{m}");
            }
        }
        e => panic!("{e:?}"),
    }
    assert!(codes(&errs).contains(&"E-CARRIER-UNDEFINED"));
    let (_, errs) = with_corpus("species S = inherit IntSetoid; end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-INHERIT-COLLECTION"]);
}

#[test]
fn parameterized_interface_is_unsupported() {
    let (_, errs) = with_corpus("species S (A is Setoid, R is Binary_relations(A, A)) = end;;").unwrap_err();
    assert_eq!(codes(&errs), ["E-UNSUPPORTED"]);
}

#[test]
fn dependencies_of_setoid_proofs() {
    let env = corpus_env();
    let flat = &env.species["Binary_relations"].flat;
    let spec = flat.get("equal_spec").unwrap().statement().unwrap().proof.clone().unwrap();
    assert_eq!(spec.def_deps.keys().collect::<Vec<_>>(), ["equal"]);
    assert_eq!(spec.decl_deps.iter().collect::<Vec<_>>(), ["is_contained_spec"]);
    let refl = flat.get("equal_reflexive").unwrap().statement().unwrap().proof.clone().unwrap();
    assert!(refl.def_deps.is_empty());
    assert_eq!(refl.decl_deps.iter().collect::<Vec<_>>(), ["equal_spec"]);
    let d = species::analyze_dependencies(&foclite::syntax::ast::Proof::By(foclite::syntax::ast::Justification::Conclude));
    assert!(d.def_deps.is_empty() && d.decl_deps.is_empty());
}
