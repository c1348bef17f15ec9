#![allow(dead_code)]

pub mod axioms;

use std::path::PathBuf;

use foclite::species::{self, make_collection, Env, SpeciesError};
use foclite::syntax::ast::Phrase;
use foclite::syntax::parse_source;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let index = std::fs::read_to_string(corpus_dir().join("index.txt")).unwrap();
    index
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .filter(|f| !f.starts_with('#'))
        .map(|f| corpus_dir().join(f))
        .collect()
}

pub fn corpus_source() -> String {
    corpus_files().iter().map(|f| std::fs::read_to_string(f).unwrap() + "\n").collect()
}

/// Elaborate every phrase in order; the first failure is returned.
pub fn load(src: &str) -> Result<Env, (String, Vec<SpeciesError>)> {
    let unit = parse_source(src).expect("parses");
    let mut env = Env::default();
    for p in &unit.phrases {
        match p {
            Phrase::Species(d) => {
                let e = species::elaborate(d, &env).map_err(|e| (d.name.name.clone(), e))?;
                env.species.insert(d.name.name.clone(), e.info);
            }
            Phrase::Collection(c) => {
                let coll = make_collection(c, &env).map_err(|e| (c.name.name.clone(), e))?;
                env.collections.insert(c.name.name.clone(), coll);
            }
        }
    }
    Ok(env)
}

pub fn corpus_env() -> Env {
    load(&corpus_source()).unwrap_or_else(|(n, e)| panic!("{n}: {e:?}"))
}

pub fn with_corpus(extra: &str) -> Result<Env, (String, Vec<SpeciesError>)> {
    load(&format!("{}\n{extra}", corpus_source()))
}
