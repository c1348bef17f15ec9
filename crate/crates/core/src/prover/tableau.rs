//! Signed tableau search over one sequent.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use crate::kernel::{Formula, Sort, Term};

use super::egraph::{head_of, Deps, EGraph};
use super::{Limit, ProofTrace, SearchBudget};

const MAX_MATCHES_PER_FORMULA: usize = 200;
const MAX_POOL_INSTANCES: usize = 200;
const SAMPLE_SIZE: usize = 24;

#[derive(Clone, Debug)]
struct Item {
    sign: bool,
    f: Formula,
    deps: Deps,
}

type Component = Vec<(bool, Formula)>;

#[derive(Clone, Debug)]
struct Beta {
    left: Component,
    right: Component,
    deps: Deps,
}

#[derive(Clone, Debug)]
struct Gamma {
    vars: Vec<(String, Sort)>,
    body: Formula,
    sign: bool,
    deps: Deps,
    triggers: Vec<Term>,
    done: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Default)]
struct Branch {
    eg: EGraph,
    queue: VecDeque<Item>,
    betas: Vec<Beta>,
    gammas: Vec<Gamma>,
    seen: HashMap<(bool, Formula), Deps>,
    rounds: u32,
}

enum Status {
    True,
    False(Deps),
    Unknown,
}

enum Scan {
    Conflict(Deps),
    Propagated,
    Choose(usize),
    Done,
}

#[derive(Debug)]
pub(super) enum Res {
    Closed,
    Saturated(Vec<String>),
    RoundLimit,
}

enum Node {
    Closed(Deps),
    Saturated(Vec<String>),
    RoundLimit,
}

pub(super) struct Search<'b> {
    budget: &'b SearchBudget,
    start: Instant,
    branches: usize,
    instances: usize,
    decisions: u32,
    fresh: u32,
}

impl<'b> Search<'b> {
    pub(super) fn new(budget: &'b SearchBudget) -> Search<'b> {
        Search { budget, start: Instant::now(), branches: 0, instances: 0, decisions: 0, fresh: 0 }
    }

    pub(super) fn trace(&self, rounds: u32) -> ProofTrace {
        ProofTrace { gamma_depth: rounds, branches: self.branches, instances: self.instances }
    }

    pub(super) fn run(&mut self, facts: &[Formula], goal: &Formula, limit: u32) -> Result<Res, Limit> {
        let mut br = Branch::default();
        for f in facts {
            br.queue.push_back(Item { sign: true, f: f.clone(), deps: Deps::empty() });
        }
        br.queue.push_back(Item { sign: false, f: goal.clone(), deps: Deps::empty() });
        Ok(match self.solve(br, limit)? {
            Node::Closed(_) => Res::Closed,
            Node::Saturated(s) => Res::Saturated(s),
            Node::RoundLimit => Res::RoundLimit,
        })
    }

    fn check_limits(&self) -> Result<(), Limit> {
        if self.branches > self.budget.max_nodes {
            return Err(Limit::Nodes);
        }
        if self.start.elapsed() > self.budget.timeout {
            return Err(Limit::Timeout);
        }
        Ok(())
    }

    fn solve(&mut self, mut br: Branch, limit: u32) -> Result<Node, Limit> {
        self.branches += 1;
        self.check_limits()?;
        loop {
            while let Some(item) = br.queue.pop_front() {
                if let Err(d) = self.process(&mut br, item) {
                    return Ok(Node::Closed(d));
                }
            }
            match br.scan_betas() {
                Scan::Conflict(d) => return Ok(Node::Closed(d)),
                Scan::Propagated => continue,
                Scan::Choose(i) => return stacker::maybe_grow(64 * 1024, 1024 * 1024, || self.split(br, i, limit)),
                Scan::Done => {}
            }
            if br.gammas.is_empty() {
                return Ok(Node::Saturated(sample(&br)));
            }
            if br.rounds >= limit {
                return Ok(Node::RoundLimit);
            }
            br.rounds += 1;
            if self.gamma_round(&mut br) == 0 {
                return Ok(Node::Saturated(sample(&br)));
            }
            self.check_limits()?;
        }
    }

    fn split(&mut self, mut br: Branch, i: usize, limit: u32) -> Result<Node, Limit> {
        let beta = br.betas.remove(i);
        let k = self.decisions;
        self.decisions += 1;
        let mut left = br.clone();
        let ld = beta.deps.union(&Deps::single(k));
        for (s, f) in &beta.left {
            left.queue.push_back(Item { sign: *s, f: f.clone(), deps: ld.clone() });
        }
        match self.solve(left, limit)? {
            Node::Closed(d1) if !d1.contains(k) => Ok(Node::Closed(d1)),
            Node::Closed(d1) => {
                let d1k = d1.without(k);
                let rd = beta.deps.union(&d1k);
                if let [(s, f)] = beta.left.as_slice() {
                    br.queue.push_back(Item { sign: !s, f: f.clone(), deps: d1k.clone() });
                }
                for (s, f) in &beta.right {
                    br.queue.push_back(Item { sign: *s, f: f.clone(), deps: rd.clone() });
                }
                match self.solve(br, limit)? {
                    Node::Closed(d2) => Ok(Node::Closed(d1k.union(&d2))),
                    open => Ok(open),
                }
            }
            open => Ok(open),
        }
    }

    fn process(&mut self, br: &mut Branch, item: Item) -> Result<(), Deps> {
        let Item { sign, f, deps } = item;
        match &f {
            Formula::True => return if sign { Ok(()) } else { Err(deps) },
            Formula::False => return if sign { Err(deps) } else { Ok(()) },
            Formula::Atom(t) => {
                let n = br.eg.intern(t);
                return br.eg.set_value(n, sign, &deps);
            }
            Formula::Eq(a, b) => {
                let na = br.eg.intern(a);
                let nb = br.eg.intern(b);
                return if sign { br.eg.merge(na, nb, &deps) } else { br.eg.add_diseq(na, nb, &deps) };
            }
            Formula::Not(a) => {
                br.queue.push_back(Item { sign: !sign, f: (**a).clone(), deps });
                return Ok(());
            }
            _ => {}
        }
        if let Some(d) = br.seen.get(&(!sign, f.clone())) {
            return Err(d.union(&deps));
        }
        if br.seen.contains_key(&(sign, f.clone())) {
            return Ok(());
        }
        br.seen.insert((sign, f.clone()), deps.clone());
        let push = |br: &mut Branch, s: bool, g: &Formula| br.queue.push_back(Item { sign: s, f: g.clone(), deps: deps.clone() });
        let beta = |br: &mut Branch, left: Component, right: Component| br.betas.push(Beta { left, right, deps: deps.clone() });
        match (&f, sign) {
            (Formula::And(a, b), true) | (Formula::Or(a, b), false) => {
                push(br, sign, a);
                push(br, sign, b);
            }
            (Formula::And(a, b), false) | (Formula::Or(a, b), true) => {
                beta(br, vec![(sign, (**a).clone())], vec![(sign, (**b).clone())]);
            }
            (Formula::Implies(a, b), true) => beta(br, vec![(false, (**a).clone())], vec![(true, (**b).clone())]),
            (Formula::Implies(a, b), false) => {
                push(br, true, a);
                push(br, false, b);
            }
            (Formula::Iff(a, b), _) => {
                let (a, b) = ((**a).clone(), (**b).clone());
                beta(br, vec![(true, a.clone()), (sign, b.clone())], vec![(false, a), (!sign, b)]);
            }
            (Formula::All(..), true) | (Formula::Ex(..), false) => {
                let mut ground = Vec::new();
                ground_subterms(&f, &mut Vec::new(), &mut ground);
                for t in ground {
                    br.eg.intern(&t);
                }
                br.gammas.push(make_gamma(&f, sign, deps.clone()));
            }
            (Formula::All(x, s, body), false) | (Formula::Ex(x, s, body), true) => {
                self.fresh += 1;
                let c = Term::App(format!("{x}#{}", self.fresh), vec![], s.clone());
                let inst = body.subst_unchecked(&HashMap::from([(x.clone(), c)]));
                push(br, sign, &inst);
            }
            _ => unreachable!("literals are handled above"),
        }
        Ok(())
    }

    /// Instantiate every gamma formula once more. Returns the number of new
    /// instances. Triggers are tried first; when they yield nothing at all,
    /// every gamma formula is instantiated from the term pool.
    fn gamma_round(&mut self, br: &mut Branch) -> usize {
        let mut n = self.instantiate(br, false);
        if n == 0 {
            n = self.instantiate(br, true);
        }
        n
    }

    fn instantiate(&mut self, br: &mut Branch, from_pool: bool) -> usize {
        let mut fresh_items = Vec::new();
        for gi in 0..br.gammas.len() {
            let g = &br.gammas[gi];
            let tuples = if from_pool || g.triggers.is_empty() {
                vec![vec![None; g.vars.len()]]
            } else {
                ematch(&br.eg, &g.triggers, &g.vars)
            };
            let mut pooled = 0;
            let mut complete: Vec<Vec<usize>> = Vec::new();
            for t in tuples {
                if t.iter().all(Option::is_some) {
                    complete.push(t.into_iter().map(Option::unwrap).collect());
                    continue;
                }
                for full in fill_from_pool(&mut br.eg, &br.gammas[gi].vars, &t) {
                    if pooled >= MAX_POOL_INSTANCES {
                        break;
                    }
                    pooled += 1;
                    complete.push(full);
                }
            }
            let g = &mut br.gammas[gi];
            for tuple in complete {
                let witnesses: Vec<usize> = tuple.iter().map(|&c| br.eg.witness(c)).collect();
                let dup = g.done.iter().any(|d| d.iter().zip(&witnesses).all(|(a, b)| br.eg.equal(*a, *b)));
                if dup {
                    continue;
                }
                let map: HashMap<String, Term> =
                    g.vars.iter().zip(&witnesses).map(|((x, _), &w)| (x.clone(), br.eg.term(w).clone())).collect();
                g.done.push(witnesses);
                fresh_items.push(Item { sign: g.sign, f: g.body.subst_unchecked(&map), deps: g.deps.clone() });
            }
        }
        self.instances += fresh_items.len();
        let n = fresh_items.len();
        br.queue.extend(fresh_items);
        n
    }
}

/// Ground subterms of a formula, skipping anything under a binder that
/// mentions the bound variable.
fn ground_subterms(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<Term>) {
    fn term(t: &Term, bound: &[String], out: &mut Vec<Term>) {
        if t.sort() != Sort::Bool && bound.iter().all(|x| !t.has_var(x)) {
            out.push(t.clone());
            return;
        }
        match t {
            Term::App(_, args, _) => args.iter().for_each(|a| term(a, bound, out)),
            Term::Cons(h, tl) => {
                term(h, bound, out);
                term(tl, bound, out);
            }
            _ => {}
        }
    }
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(t) => term(t, bound, out),
        Formula::Eq(a, b) => {
            term(a, bound, out);
            term(b, bound, out);
        }
        Formula::Not(a) => ground_subterms(a, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            ground_subterms(a, bound, out);
            ground_subterms(b, bound, out);
        }
        Formula::All(x, _, b) | Formula::Ex(x, _, b) => {
            bound.push(x.clone());
            ground_subterms(b, bound, out);
            bound.pop();
        }
    }
}

fn sample(br: &Branch) -> Vec<String> {
    let mut lits = br.eg.literals();
    lits.truncate(SAMPLE_SIZE);
    lits
}

fn make_gamma(f: &Formula, sign: bool, deps: Deps) -> Gamma {
    let mut vars: Vec<(String, Sort)> = Vec::new();
    let mut body = f;
    loop {
        match (body, sign) {
            (Formula::All(x, s, b), true) | (Formula::Ex(x, s, b), false) if !vars.iter().any(|(y, _)| y == x) => {
                vars.push((x.clone(), s.clone()));
                body = b;
            }
            _ => break,
        }
    }
    let triggers = choose_triggers(body, &vars);
    Gamma { vars, body: body.clone(), sign, deps, triggers, done: Vec::new() }
}

fn term_vars<'a>(t: &Term, vars: &'a [(String, Sort)]) -> Vec<&'a str> {
    vars.iter().filter(|(x, _)| t.has_var(x)).map(|(x, _)| x.as_str()).collect()
}

fn collect_candidates(f: &Formula, out: &mut Vec<Term>) {
    fn term(t: &Term, out: &mut Vec<Term>) {
        if matches!(t, Term::App(..) | Term::Cons(..)) && !out.contains(t) {
            out.push(t.clone());
        }
        match t {
            Term::App(_, args, _) => args.iter().for_each(|a| term(a, out)),
            Term::Cons(h, tl) => {
                term(h, out);
                term(tl, out);
            }
            _ => {}
        }
    }
    match f {
        Formula::True | Formula::False => {}
        Formula::Atom(t) => term(t, out),
        Formula::Eq(a, b) => {
            term(a, out);
            term(b, out);
        }
        Formula::Not(a) => collect_candidates(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_candidates(a, out);
            collect_candidates(b, out);
        }
        // Nested quantifiers bind their own variables; terms below them may
        // still mention ours.
        Formula::All(x, _, b) | Formula::Ex(x, _, b) => {
            let mut inner = Vec::new();
            collect_candidates(b, &mut inner);
            for t in inner {
                if !t.has_var(x) && !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
}

/// Greedy multi-pattern covering as many bound variables as possible.
fn choose_triggers(body: &Formula, vars: &[(String, Sort)]) -> Vec<Term> {
    let mut cands = Vec::new();
    collect_candidates(body, &mut cands);
    let mut uncovered: Vec<&str> = vars.iter().map(|(x, _)| x.as_str()).collect();
    let mut chosen = Vec::new();
    while !uncovered.is_empty() {
        let best = cands
            .iter()
            .enumerate()
            .map(|(i, t)| (i, term_vars(t, vars).iter().filter(|x| uncovered.contains(x)).count()))
            .filter(|(_, n)| *n > 0)
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)));
        let Some((i, _)) = best else { break };
        let t = cands.remove(i);
        let covered = term_vars(&t, vars);
        uncovered.retain(|x| !covered.contains(x));
        chosen.push(t);
    }
    chosen
}

type Subst = Vec<Option<usize>>;

fn var_index(t: &Term, vars: &[(String, Sort)]) -> Option<usize> {
    match t {
        Term::Var(x, _) => vars.iter().position(|(y, _)| y == x),
        _ => None,
    }
}

fn is_ground(t: &Term, vars: &[(String, Sort)]) -> bool {
    vars.iter().all(|(x, _)| !t.has_var(x))
}

fn match_class(eg: &EGraph, pat: &Term, class: usize, vars: &[(String, Sort)], s: Subst, out: &mut Vec<Subst>) {
    if let Some(i) = var_index(pat, vars) {
        match s[i] {
            Some(c) if eg.equal(c, class) => out.push(s),
            Some(_) => {}
            None => {
                let mut s = s;
                s[i] = Some(eg.find(class));
                out.push(s);
            }
        }
        return;
    }
    if is_ground(pat, vars) {
        if eg.get(pat).is_some_and(|n| eg.equal(n, class)) {
            out.push(s);
        }
        return;
    }
    let (head, arity) = match pat {
        Term::App(f, args, _) => (f.as_str(), args.len()),
        Term::Cons(..) => ("::", 2),
        _ => return,
    };
    for m in eg.members_with_head(class, head, arity) {
        match_node(eg, pat, m, vars, s.clone(), out);
    }
}

fn match_node(eg: &EGraph, pat: &Term, node: usize, vars: &[(String, Sort)], s: Subst, out: &mut Vec<Subst>) {
    let args: Vec<&Term> = match pat {
        Term::App(_, args, _) => args.iter().collect(),
        Term::Cons(h, t) => vec![h, t],
        _ => return,
    };
    let children = eg.children(node);
    if children.len() != args.len() || *eg.sort(node) != pat.sort() {
        return;
    }
    let mut substs = vec![s];
    for (a, &c) in args.iter().zip(children) {
        let mut next = Vec::new();
        for s in substs {
            match_class(eg, a, c, vars, s, &mut next);
        }
        substs = next;
        if substs.is_empty() {
            return;
        }
    }
    out.extend(substs);
}

fn ematch(eg: &EGraph, triggers: &[Term], vars: &[(String, Sort)]) -> Vec<Subst> {
    if triggers.is_empty() {
        return Vec::new();
    }
    let mut substs: Vec<Subst> = vec![vec![None; vars.len()]];
    for trig in triggers {
        let Some(head) = head_of(trig) else { return Vec::new() };
        let mut next = Vec::new();
        for s in substs {
            for &n in eg.nodes_with_head(head) {
                match_node(eg, trig, n, vars, s.clone(), &mut next);
            }
        }
        let mut uniq: Vec<Subst> = Vec::new();
        for s in next {
            let key: Subst = s.iter().map(|c| c.map(|c| eg.find(c))).collect();
            if !uniq.contains(&key) {
                uniq.push(key);
            }
            if uniq.len() >= MAX_MATCHES_PER_FORMULA {
                break;
            }
        }
        substs = uniq;
        if substs.is_empty() {
            break;
        }
    }
    substs
}

/// Complete a partial substitution with every class of the right sort.
fn fill_from_pool(eg: &mut EGraph, vars: &[(String, Sort)], partial: &Subst) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for (i, (_, sort)) in vars.iter().enumerate() {
        let choices = match partial[i] {
            Some(c) => vec![c],
            None => {
                let mut pool = eg.class_witnesses(sort);
                if pool.is_empty() {
                    pool.push(eg.intern(&Term::App(format!("c#{sort}"), vec![], sort.clone())));
                }
                pool
            }
        };
        let mut next = Vec::new();
        'outer: for prefix in &out {
            for &c in &choices {
                let mut p = prefix.clone();
                p.push(c);
                next.push(p);
                if next.len() >= MAX_POOL_INSTANCES {
                    break 'outer;
                }
            }
        }
        out = next;
    }
    out
}

impl Branch {
    fn part(&self, sign: bool, f: &Formula) -> Status {
        match f {
            Formula::True => {
                if sign {
                    Status::True
                } else {
                    Status::False(Deps::empty())
                }
            }
            Formula::False => {
                if sign {
                    Status::False(Deps::empty())
                } else {
                    Status::True
                }
            }
            Formula::Atom(t) => match self.eg.get(t).and_then(|n| self.eg.value(n)) {
                Some((v, _)) if v == sign => Status::True,
                Some((_, d)) => Status::False(d),
                None => Status::Unknown,
            },
            Formula::Eq(a, b) => match (self.eg.get(a), self.eg.get(b)) {
                (Some(x), Some(y)) if self.eg.equal(x, y) => {
                    if sign {
                        Status::True
                    } else {
                        Status::False(self.eg.class_deps(x).clone())
                    }
                }
                (Some(x), Some(y)) => match self.eg.distinct(x, y) {
                    Some(d) if sign => Status::False(d),
                    Some(_) => Status::True,
                    None => Status::Unknown,
                },
                _ => Status::Unknown,
            },
            Formula::Not(a) => self.part(!sign, a),
            _ => {
                if self.seen.contains_key(&(sign, f.clone())) {
                    Status::True
                } else if let Some(d) = self.seen.get(&(!sign, f.clone())) {
                    Status::False(d.clone())
                } else {
                    Status::Unknown
                }
            }
        }
    }

    fn component(&self, c: &Component) -> Status {
        let mut all_true = true;
        for (s, f) in c {
            match self.part(*s, f) {
                Status::False(d) => return Status::False(d),
                Status::Unknown => all_true = false,
                Status::True => {}
            }
        }
        if all_true {
            Status::True
        } else {
            Status::Unknown
        }
    }

    fn scan_betas(&mut self) -> Scan {
        let mut i = 0;
        while i < self.betas.len() {
            let b = &self.betas[i];
            match (self.component(&b.left), self.component(&b.right)) {
                (Status::True, _) | (_, Status::True) => {
                    self.betas.remove(i);
                }
                (Status::False(d1), Status::False(d2)) => return Scan::Conflict(d1.union(&d2).union(&b.deps)),
                (Status::False(d), Status::Unknown) => {
                    let b = self.betas.remove(i);
                    let deps = b.deps.union(&d);
                    for (s, f) in b.right {
                        self.queue.push_back(Item { sign: s, f, deps: deps.clone() });
                    }
                    return Scan::Propagated;
                }
                (Status::Unknown, Status::False(d)) => {
                    let b = self.betas.remove(i);
                    let deps = b.deps.union(&d);
                    for (s, f) in b.left {
                        self.queue.push_back(Item { sign: s, f, deps: deps.clone() });
                    }
                    return Scan::Propagated;
                }
                (Status::Unknown, Status::Unknown) => i += 1,
            }
        }
        if self.betas.is_empty() {
            Scan::Done
        } else {
            Scan::Choose(0)
        }
    }
}
