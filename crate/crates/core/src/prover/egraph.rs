//! Ground congruence closure with truth values on boolean classes and
//! coarse dependency tracking for backjumping.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::kernel::{Sort, Term};

/// Sorted set of branching decisions a fact depends on.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Deps(Vec<u32>);

impl Deps {
    pub fn empty() -> Deps {
        Deps(Vec::new())
    }

    pub fn single(d: u32) -> Deps {
        Deps(vec![d])
    }

    pub fn union(&self, other: &Deps) -> Deps {
        if other.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        while i < self.0.len() || j < other.0.len() {
            let next = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                    *a
                }
                (Some(a), Some(b)) if a < b => {
                    i += 1;
                    *a
                }
                (Some(_), Some(b)) => {
                    j += 1;
                    *b
                }
                (Some(a), None) => {
                    i += 1;
                    *a
                }
                (None, Some(b)) => {
                    j += 1;
                    *b
                }
                (None, None) => unreachable!(),
            };
            out.push(next);
        }
        Deps(out)
    }

    pub fn contains(&self, d: u32) -> bool {
        self.0.binary_search(&d).is_ok()
    }

    pub fn without(&self, d: u32) -> Deps {
        Deps(self.0.iter().copied().filter(|x| *x != d).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Sym {
    Var(String),
    App(String),
    Nil(Sort),
    Cons,
    Int(BigInt),
    Bool(bool),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tag {
    Int(BigInt),
    Bool(bool),
    Nil,
    /// A member built with `::`.
    Cons(usize),
}

#[derive(Clone, Debug)]
struct Node {
    sym: Sym,
    children: Vec<usize>,
    term: Term,
    sort: Sort,
}

#[derive(Clone, Debug, Default)]
pub struct EGraph {
    nodes: Vec<Node>,
    parent: Vec<usize>,
    members: Vec<Vec<usize>>,
    uses: Vec<Vec<usize>>,
    table: HashMap<(Sym, Vec<usize>), usize>,
    lookup: HashMap<Term, usize>,
    by_head: HashMap<String, Vec<usize>>,
    value: Vec<Option<(bool, Deps)>>,
    tag: Vec<Option<Tag>>,
    deps: Vec<Deps>,
    diseqs: Vec<(usize, usize, Deps)>,
}

/// Name used to index nodes for matching.
pub fn head_of(t: &Term) -> Option<&str> {
    match t {
        Term::App(f, _, _) => Some(f),
        Term::Cons(..) => Some("::"),
        _ => None,
    }
}

impl EGraph {
    pub fn find(&self, mut n: usize) -> usize {
        while self.parent[n] != n {
            n = self.parent[n];
        }
        n
    }

    pub fn term(&self, n: usize) -> &Term {
        &self.nodes[n].term
    }

    pub fn sort(&self, n: usize) -> &Sort {
        &self.nodes[n].sort
    }

    /// Oldest member of the class.
    pub fn witness(&self, n: usize) -> usize {
        let r = self.find(n);
        *self.members[r].iter().min().expect("classes are never empty")
    }

    pub fn children(&self, n: usize) -> &[usize] {
        &self.nodes[n].children
    }

    pub fn nodes_with_head(&self, head: &str) -> &[usize] {
        self.by_head.get(head).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Members of the class of `n` whose head is `head` with `arity` children.
    pub fn members_with_head(&self, n: usize, head: &str, arity: usize) -> Vec<usize> {
        let r = self.find(n);
        let mut out: Vec<usize> = self.members[r]
            .iter()
            .copied()
            .filter(|&m| {
                let node = &self.nodes[m];
                node.children.len() == arity
                    && match &node.sym {
                        Sym::App(f) => f == head,
                        Sym::Cons => head == "::",
                        _ => false,
                    }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn get(&self, t: &Term) -> Option<usize> {
        self.lookup.get(t).copied()
    }

    pub fn class_deps(&self, n: usize) -> &Deps {
        &self.deps[self.find(n)]
    }

    fn key(&self, n: usize) -> (Sym, Vec<usize>) {
        let node = &self.nodes[n];
        (node.sym.clone(), node.children.iter().map(|&c| self.find(c)).collect())
    }

    /// Add a ground term. The result is a node id; classes are found with `find`.
    pub fn intern(&mut self, t: &Term) -> usize {
        if let Some(&n) = self.lookup.get(t) {
            return n;
        }
        let (sym, kids): (Sym, Vec<&Term>) = match t {
            Term::Var(x, _) => (Sym::Var(x.clone()), vec![]),
            Term::App(f, args, _) => (Sym::App(f.clone()), args.iter().collect()),
            Term::Nil(s) => (Sym::Nil(s.clone()), vec![]),
            Term::Cons(h, tl) => (Sym::Cons, vec![h, tl]),
            Term::Int(i) => (Sym::Int(i.clone()), vec![]),
            Term::Bool(b) => (Sym::Bool(*b), vec![]),
        };
        let mut children = Vec::with_capacity(kids.len());
        for k in kids {
            children.push(self.intern(k));
        }
        let key = (sym.clone(), children.iter().map(|&c| self.find(c)).collect::<Vec<_>>());
        if let Some(&n) = self.table.get(&key) {
            self.lookup.insert(t.clone(), n);
            return n;
        }
        let id = self.nodes.len();
        let tag = match &sym {
            Sym::Int(i) => Some(Tag::Int(i.clone())),
            Sym::Bool(b) => Some(Tag::Bool(*b)),
            Sym::Nil(_) => Some(Tag::Nil),
            Sym::Cons => Some(Tag::Cons(id)),
            _ => None,
        };
        let value = match &sym {
            Sym::Bool(b) => Some((*b, Deps::empty())),
            _ => None,
        };
        if let Some(h) = head_of(t) {
            self.by_head.entry(h.to_string()).or_default().push(id);
        }
        for &c in &children {
            let r = self.find(c);
            self.uses[r].push(id);
        }
        self.nodes.push(Node { sym, children, term: t.clone(), sort: t.sort() });
        self.parent.push(id);
        self.members.push(vec![id]);
        self.uses.push(Vec::new());
        self.value.push(value);
        self.tag.push(tag);
        self.deps.push(Deps::empty());
        self.table.insert(key, id);
        self.lookup.insert(t.clone(), id);
        id
    }

    pub fn equal(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Dependencies of `a` and `b` being known distinct, if they are.
    pub fn distinct(&self, a: usize, b: usize) -> Option<Deps> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        for (x, y, d) in &self.diseqs {
            let (rx, ry) = (self.find(*x), self.find(*y));
            if (rx == ra && ry == rb) || (rx == rb && ry == ra) {
                return Some(d.union(&self.deps[ra]).union(&self.deps[rb]));
            }
        }
        match (&self.tag[ra], &self.tag[rb]) {
            (Some(Tag::Cons(_)), Some(Tag::Cons(_))) => None,
            (Some(x), Some(y)) if x != y => Some(self.deps[ra].union(&self.deps[rb])),
            _ => None,
        }
    }

    /// Truth value of a boolean class with its justification.
    pub fn value(&self, n: usize) -> Option<(bool, Deps)> {
        let r = self.find(n);
        self.value[r].as_ref().map(|(b, d)| (*b, d.union(&self.deps[r])))
    }

    pub fn set_value(&mut self, n: usize, b: bool, d: &Deps) -> Result<(), Deps> {
        let r = self.find(n);
        match &self.value[r] {
            Some((x, dx)) if *x != b => Err(dx.union(d).union(&self.deps[r])),
            Some(_) => Ok(()),
            None => {
                self.value[r] = Some((b, d.clone()));
                Ok(())
            }
        }
    }

    pub fn add_diseq(&mut self, a: usize, b: usize, d: &Deps) -> Result<(), Deps> {
        if self.equal(a, b) {
            return Err(d.union(self.class_deps(a)));
        }
        self.diseqs.push((a, b, d.clone()));
        Ok(())
    }

    pub fn merge(&mut self, a: usize, b: usize, d: &Deps) -> Result<(), Deps> {
        let mut pending = vec![(a, b, d.clone())];
        while let Some((a, b, d)) = pending.pop() {
            let (mut ra, mut rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            if self.members[ra].len() < self.members[rb].len() {
                std::mem::swap(&mut ra, &mut rb);
            }
            let nd = self.deps[ra].union(&self.deps[rb]).union(&d);
            match (self.value[ra].clone(), self.value[rb].clone()) {
                (Some((x, dx)), Some((y, dy))) if x != y => return Err(nd.union(&dx).union(&dy)),
                (None, Some(v)) => self.value[ra] = Some(v),
                _ => {}
            }
            match (self.tag[ra].clone(), self.tag[rb].clone()) {
                (Some(Tag::Cons(x)), Some(Tag::Cons(y))) => {
                    let (cx, cy) = (self.nodes[x].children.clone(), self.nodes[y].children.clone());
                    pending.push((cx[0], cy[0], nd.clone()));
                    pending.push((cx[1], cy[1], nd.clone()));
                }
                (Some(x), Some(y)) if x != y => return Err(nd),
                (None, Some(t)) => self.tag[ra] = Some(t),
                _ => {}
            }
            self.parent[rb] = ra;
            let moved = std::mem::take(&mut self.members[rb]);
            self.members[ra].extend(moved);
            self.deps[ra] = nd;
            let uses = std::mem::take(&mut self.uses[rb]);
            for u in uses {
                let key = self.key(u);
                match self.table.get(&key) {
                    Some(&v) if self.find(v) != self.find(u) => {
                        let mut cd = Deps::empty();
                        for &c in &self.nodes[u].children {
                            cd = cd.union(&self.deps[self.find(c)]);
                        }
                        pending.push((u, v, cd));
                    }
                    Some(_) => {}
                    None => {
                        self.table.insert(key, u);
                    }
                }
                self.uses[ra].push(u);
            }
        }
        for (x, y, d) in &self.diseqs {
            if self.find(*x) == self.find(*y) {
                return Err(d.union(&self.deps[self.find(*x)]));
            }
        }
        Ok(())
    }

    /// One representative node per class, of the given sort, oldest first.
    pub fn class_witnesses(&self, sort: &Sort) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.nodes.len())
            .filter(|&n| self.parent[n] == n && self.nodes[n].sort == *sort)
            .map(|r| self.witness(r))
            .collect();
        out.sort_unstable();
        out
    }

    /// Literals holding in the graph, for reporting open branches.
    pub fn literals(&self) -> Vec<String> {
        let mut out = Vec::new();
        for n in 0..self.nodes.len() {
            if matches!(self.nodes[n].sym, Sym::Bool(_)) || !matches!(self.nodes[n].sort, Sort::Bool) {
                continue;
            }
            if let Some((b, _)) = self.value(n) {
                let t = self.nodes[n].term.to_string();
                out.push(if b { t } else { format!("not {t}") });
            }
        }
        for (x, y, _) in &self.diseqs {
            out.push(format!("not {} = {}", self.nodes[*x].term, self.nodes[*y].term));
        }
        for n in 0..self.nodes.len() {
            let r = self.find(n);
            if r != n && !matches!(self.nodes[n].sort, Sort::Bool) {
                out.push(format!("{} = {}", self.nodes[n].term, self.nodes[self.witness(r)].term));
            }
        }
        out
    }
}
