//! LTL to Büchi translation.
//!
//! Formulas are put in negation normal form with every maximal propositional
//! subformula collapsed into one BDD. A tableau over sets of temporal obligations
//! yields a transition-based generalized Büchi automaton (one acceptance set per
//! until), which is then degeneralized with a level counter, quotiented by
//! bisimulation and trimmed.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use super::{scc, Nba};
use crate::bdd::{Bdd, BddManager};
use crate::ltl::{Formula, FormulaId, Spec};
use crate::session::Session;

pub const DEFAULT_STATE_CAP: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("automaton exceeds the state cap of {0}")]
    StateCap(usize),
    #[error("specification atoms do not match the session vocabulary")]
    VocabMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct TId(u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Term {
    Lit(Bdd),
    And(TId, TId),
    Or(TId, TId),
    Next(TId),
    Until(TId, TId),
    Release(TId, TId),
}

struct Terms {
    nodes: Vec<Term>,
    index: HashMap<Term, TId>,
}

impl Terms {
    fn new() -> Self {
        Terms {
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn get(&self, t: TId) -> Term {
        self.nodes[t.0 as usize]
    }

    fn intern(&mut self, t: Term) -> TId {
        if let Some(&id) = self.index.get(&t) {
            return id;
        }
        let id = TId(self.nodes.len() as u32);
        self.nodes.push(t);
        self.index.insert(t, id);
        id
    }

    fn lit(&self, t: TId) -> Option<Bdd> {
        match self.get(t) {
            Term::Lit(b) => Some(b),
            _ => None,
        }
    }

    fn constant(&mut self, mgr: &BddManager, v: bool) -> TId {
        self.intern(Term::Lit(mgr.constant(v)))
    }

    fn and(&mut self, mgr: &mut BddManager, a: TId, b: TId) -> TId {
        match (self.lit(a), self.lit(b)) {
            (Some(x), Some(y)) => {
                let l = mgr.and(x, y);
                self.intern(Term::Lit(l))
            }
            (Some(x), _) if mgr.is_false(x) => a,
            (_, Some(y)) if mgr.is_false(y) => b,
            (Some(x), _) if mgr.is_true(x) => b,
            (_, Some(y)) if mgr.is_true(y) => a,
            _ if a == b => a,
            _ => self.intern(Term::And(a.min(b), a.max(b))),
        }
    }

    fn or(&mut self, mgr: &mut BddManager, a: TId, b: TId) -> TId {
        match (self.lit(a), self.lit(b)) {
            (Some(x), Some(y)) => {
                let l = mgr.or(x, y);
                self.intern(Term::Lit(l))
            }
            (Some(x), _) if mgr.is_true(x) => a,
            (_, Some(y)) if mgr.is_true(y) => b,
            (Some(x), _) if mgr.is_false(x) => b,
            (_, Some(y)) if mgr.is_false(y) => a,
            _ if a == b => a,
            _ => self.intern(Term::Or(a.min(b), a.max(b))),
        }
    }

    fn next(&mut self, mgr: &BddManager, a: TId) -> TId {
        match self.lit(a) {
            Some(x) if mgr.is_const(x) => a,
            _ => self.intern(Term::Next(a)),
        }
    }

    fn until(&mut self, mgr: &BddManager, a: TId, b: TId) -> TId {
        match (self.lit(a), self.lit(b)) {
            (_, Some(y)) if mgr.is_const(y) => b,
            (Some(x), _) if mgr.is_false(x) => b,
            _ => self.intern(Term::Until(a, b)),
        }
    }

    fn release(&mut self, mgr: &BddManager, a: TId, b: TId) -> TId {
        match (self.lit(a), self.lit(b)) {
            (_, Some(y)) if mgr.is_const(y) => b,
            (Some(x), _) if mgr.is_true(x) => b,
            _ => self.intern(Term::Release(a, b)),
        }
    }
}

struct Normalizer<'a> {
    spec: &'a Spec,
    prop: HashMap<FormulaId, Bdd>,
    memo: HashMap<(FormulaId, bool), TId>,
}

impl Normalizer<'_> {
    /// BDDs for every propositional subformula, computed bottom-up.
    fn collect_props(&mut self, session: &mut Session) {
        let mut temporal: HashMap<FormulaId, bool> = HashMap::new();
        for f in self.spec.subformulas(self.spec.formula()) {
            use Formula::*;
            let node = self.spec.node(f);
            let t = match node {
                Next(_) | Until(..) | Release(..) | Finally(_) | Globally(_) => true,
                _ => self.spec.children(f).iter().any(|c| temporal[c]),
            };
            temporal.insert(f, t);
            if t {
                continue;
            }
            let mgr = &mut session.bdd;
            let p = |g: FormulaId| self.prop[&g];
            let b = match node {
                True => mgr.tt(),
                False => mgr.ff(),
                Atom(a) => {
                    let v = session.vocab.var(a as usize);
                    mgr.var(v)
                }
                Not(a) => mgr.not(p(a)),
                And(a, b) => mgr.and(p(a), p(b)),
                Or(a, b) => mgr.or(p(a), p(b)),
                Implies(a, b) => mgr.implies(p(a), p(b)),
                Iff(a, b) => mgr.iff(p(a), p(b)),
                _ => unreachable!("temporal operator in propositional formula"),
            };
            self.prop.insert(f, b);
        }
    }

    fn nnf(&mut self, terms: &mut Terms, mgr: &mut BddManager, f: FormulaId, neg: bool) -> TId {
        if let Some(&t) = self.memo.get(&(f, neg)) {
            return t;
        }
        let r = if let Some(&b) = self.prop.get(&f) {
            let l = if neg { mgr.not(b) } else { b };
            terms.intern(Term::Lit(l))
        } else {
            use Formula::*;
            match self.spec.node(f) {
                Not(a) => self.nnf(terms, mgr, a, !neg),
                And(a, b) | Or(a, b) => {
                    let x = self.nnf(terms, mgr, a, neg);
                    let y = self.nnf(terms, mgr, b, neg);
                    let conj = matches!(self.spec.node(f), And(..)) != neg;
                    if conj {
                        terms.and(mgr, x, y)
                    } else {
                        terms.or(mgr, x, y)
                    }
                }
                Implies(a, b) => {
                    let x = self.nnf(terms, mgr, a, !neg);
                    let y = self.nnf(terms, mgr, b, neg);
                    if neg {
                        terms.and(mgr, x, y)
                    } else {
                        terms.or(mgr, x, y)
                    }
                }
                Iff(a, b) => {
                    let pa = self.nnf(terms, mgr, a, false);
                    let na = self.nnf(terms, mgr, a, true);
                    let pb = self.nnf(terms, mgr, b, neg);
                    let nb = self.nnf(terms, mgr, b, !neg);
                    let both = terms.and(mgr, pa, pb);
                    let neither = terms.and(mgr, na, nb);
                    terms.or(mgr, both, neither)
                }
                Next(a) => {
                    let x = self.nnf(terms, mgr, a, neg);
                    terms.next(mgr, x)
                }
                Until(a, b) | Release(a, b) => {
                    let x = self.nnf(terms, mgr, a, neg);
                    let y = self.nnf(terms, mgr, b, neg);
                    if matches!(self.spec.node(f), Until(..)) != neg {
                        terms.until(mgr, x, y)
                    } else {
                        terms.release(mgr, x, y)
                    }
                }
                Finally(a) | Globally(a) => {
                    let x = self.nnf(terms, mgr, a, neg);
                    if matches!(self.spec.node(f), Finally(_)) != neg {
                        let t = terms.constant(mgr, true);
                        terms.until(mgr, t, x)
                    } else {
                        let ff = terms.constant(mgr, false);
                        terms.release(mgr, ff, x)
                    }
                }
                True | False | Atom(_) => unreachable!("handled as propositional"),
            }
        };
        self.memo.insert((f, neg), r);
        r
    }
}

#[derive(Debug, Clone)]
struct Cover {
    label: Bdd,
    next: Vec<TId>,
    pending: Vec<TId>,
}

struct Branch {
    todo: Vec<TId>,
    done: BTreeSet<TId>,
    label: Bdd,
    next: BTreeSet<TId>,
    pending: BTreeSet<TId>,
}

fn expand(terms: &Terms, mgr: &mut BddManager, state: &[TId]) -> Vec<Cover> {
    let mut covers: Vec<Cover> = Vec::new();
    let mut stack = vec![Branch {
        todo: state.to_vec(),
        done: BTreeSet::new(),
        label: mgr.tt(),
        next: BTreeSet::new(),
        pending: BTreeSet::new(),
    }];
    while let Some(mut br) = stack.pop() {
        let Some(t) = br.todo.pop() else {
            covers.push(Cover {
                label: br.label,
                next: br.next.into_iter().collect(),
                pending: br.pending.into_iter().collect(),
            });
            continue;
        };
        if !br.done.insert(t) {
            stack.push(br);
            continue;
        }
        match terms.get(t) {
            Term::Lit(b) => {
                br.label = mgr.and(br.label, b);
                if mgr.is_sat(br.label) {
                    stack.push(br);
                }
            }
            Term::And(a, b) => {
                br.todo.push(a);
                br.todo.push(b);
                stack.push(br);
            }
            Term::Next(a) => {
                br.next.insert(a);
                stack.push(br);
            }
            Term::Or(a, b) => {
                let mut other = fork(&br);
                br.todo.push(a);
                other.todo.push(b);
                stack.push(other);
                stack.push(br);
            }
            Term::Until(a, b) => {
                let mut later = fork(&br);
                br.todo.push(b);
                later.todo.push(a);
                later.next.insert(t);
                later.pending.insert(t);
                stack.push(later);
                stack.push(br);
            }
            Term::Release(a, b) => {
                let mut later = fork(&br);
                br.todo.push(a);
                br.todo.push(b);
                later.todo.push(b);
                later.next.insert(t);
                stack.push(later);
                stack.push(br);
            }
        }
    }
    simplify_covers(mgr, covers)
}

fn fork(b: &Branch) -> Branch {
    Branch {
        todo: b.todo.clone(),
        done: b.done.clone(),
        label: b.label,
        next: b.next.clone(),
        pending: b.pending.clone(),
    }
}

fn is_subset(a: &[TId], b: &[TId]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Merges covers with equal obligations and drops covers dominated by another one
/// with a weaker label requirement, fewer obligations and fewer pending untils.
fn simplify_covers(mgr: &mut BddManager, covers: Vec<Cover>) -> Vec<Cover> {
    let mut merged: Vec<Cover> = Vec::new();
    let mut by_key: HashMap<(Vec<TId>, Vec<TId>), usize> = HashMap::new();
    for c in covers {
        let key = (c.next.clone(), c.pending.clone());
        if let Some(&i) = by_key.get(&key) {
            merged[i].label = mgr.or(merged[i].label, c.label);
        } else {
            by_key.insert(key, merged.len());
            merged.push(c);
        }
    }
    let n = merged.len();
    let mut dead = vec![false; n];
    for j in 0..n {
        for i in 0..n {
            if i == j || dead[i] {
                continue;
            }
            let (ci, cj) = (&merged[i], &merged[j]);
            if is_subset(&ci.next, &cj.next) && is_subset(&ci.pending, &cj.pending) {
                let extra = mgr.implies(cj.label, ci.label);
                if mgr.is_true(extra) {
                    dead[j] = true;
                    break;
                }
            }
        }
    }
    merged
        .into_iter()
        .zip(dead)
        .filter(|(_, d)| !d)
        .map(|(c, _)| c)
        .collect()
}

/// Translates `spec` into a trimmed Büchi automaton over the session's vocabulary.
pub fn translate(session: &mut Session, spec: &Spec, state_cap: usize) -> Result<Nba, TranslateError> {
    let names_match = spec.inputs() == session.vocab.inputs() && spec.outputs() == session.vocab.outputs();
    if !names_match {
        return Err(TranslateError::VocabMismatch);
    }
    let mut norm = Normalizer {
        spec,
        prop: HashMap::new(),
        memo: HashMap::new(),
    };
    norm.collect_props(session);
    let mut terms = Terms::new();
    let root = norm.nnf(&mut terms, &mut session.bdd, spec.formula(), false);
    let mgr = &mut session.bdd;

    // generalized automaton over obligation sets
    let init = conjuncts(&terms, root);
    let mut ids: HashMap<Vec<TId>, usize> = HashMap::new();
    let mut sets: Vec<Vec<TId>> = Vec::new();
    let mut trans: Vec<Vec<(Bdd, usize, Vec<TId>)>> = Vec::new();
    ids.insert(init.clone(), 0);
    sets.push(init);
    let mut i = 0;
    while i < sets.len() {
        let covers = expand(&terms, mgr, &sets[i].clone());
        let mut out = Vec::with_capacity(covers.len());
        for c in covers {
            let mut next: Vec<TId> = Vec::new();
            for t in c.next {
                next.extend(conjuncts(&terms, t));
            }
            next.sort();
            next.dedup();
            let dst = match ids.get(&next) {
                Some(&d) => d,
                None => {
                    if sets.len() >= state_cap {
                        return Err(TranslateError::StateCap(state_cap));
                    }
                    let d = sets.len();
                    ids.insert(next.clone(), d);
                    sets.push(next);
                    d
                }
            };
            out.push((c.label, dst, c.pending));
        }
        trans.push(out);
        i += 1;
    }

    let mut untils: Vec<TId> = trans
        .iter()
        .flatten()
        .flat_map(|(_, _, p)| p.iter().copied())
        .collect();
    untils.sort();
    untils.dedup();
    let k = untils.len();

    // degeneralize: (set, level), accepting at level k
    let mut deg: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = vec![(0, 0)];
    deg.insert((0, 0), 0);
    let mut nba = Nba::new(1);
    let mut i = 0;
    while i < order.len() {
        let (s, lvl) = order[i];
        nba.set_accepting(i, lvl == k);
        for (label, dst, pending) in &trans[s] {
            let mut j = if lvl == k { 0 } else { lvl };
            while j < k && pending.binary_search(&untils[j]).is_err() {
                j += 1;
            }
            let d = match deg.get(&(*dst, j)) {
                Some(&d) => d,
                None => {
                    if order.len() >= state_cap {
                        return Err(TranslateError::StateCap(state_cap));
                    }
                    let d = nba.add_state();
                    deg.insert((*dst, j), d);
                    order.push((*dst, j));
                    d
                }
            };
            nba.add_edge(mgr, i, d, *label);
        }
        i += 1;
    }
    let nba = normalize_transient(&nba);
    let nba = bisimulation_quotient(mgr, &nba);
    Ok(nba.trim())
}

fn conjuncts(terms: &Terms, t: TId) -> Vec<TId> {
    let mut out = Vec::new();
    let mut stack = vec![t];
    while let Some(t) = stack.pop() {
        match terms.get(t) {
            Term::And(a, b) => {
                stack.push(a);
                stack.push(b);
            }
            Term::Lit(_) => out.push(t),
            _ => out.push(t),
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Acceptance of states outside every cycle is irrelevant; clear it so that such
/// states can merge with their neighbours.
fn normalize_transient(nba: &Nba) -> Nba {
    let succ: Vec<Vec<usize>> = (0..nba.num_states())
        .map(|s| nba.out_edges(s).map(|e| e.dst).collect())
        .collect();
    let comp = scc(&succ);
    let mut out = nba.clone();
    for s in 0..nba.num_states() {
        if !comp.nontrivial[comp.id[s]] {
            out.set_accepting(s, false);
        }
    }
    out
}

/// Merges bisimilar states (same acceptance, same label into every class).
pub(crate) fn bisimulation_quotient(mgr: &mut BddManager, nba: &Nba) -> Nba {
    let n = nba.num_states();
    let mut block: Vec<usize> = (0..n).map(|s| usize::from(nba.is_accepting(s))).collect();
    let mut count = usize::MAX;
    loop {
        let mut sigs: HashMap<(usize, Vec<(usize, Bdd)>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for s in 0..n {
            let mut per: Vec<(usize, Bdd)> = Vec::new();
            for e in nba.out_edges(s) {
                let b = block[e.dst];
                match per.iter_mut().find(|(x, _)| *x == b) {
                    Some(slot) => slot.1 = mgr.or(slot.1, e.label),
                    None => per.push((b, e.label)),
                }
            }
            per.sort();
            let len = sigs.len();
            next[s] = *sigs.entry((block[s], per)).or_insert(len);
        }
        let c = sigs.len();
        block = next;
        if c == count {
            break;
        }
        count = c;
    }
    let mut out = Nba::new(count);
    for s in 0..n {
        out.set_accepting(block[s], nba.is_accepting(s));
    }
    for e in nba.edges() {
        out.add_edge(mgr, block[e.src], block[e.dst], e.label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_g_a() -> (Session, Spec) {
        let mut spec = Spec::with_names(&["a"], &[]).unwrap();
        let a = spec.atom("a").unwrap();
        let g = spec.globally(a);
        spec.set_formula(g);
        (Session::with_names(&["a"], &[]).unwrap(), spec)
    }

    #[test]
    fn globally_is_one_accepting_self_loop() {
        let (mut s, spec) = spec_g_a();
        let nba = translate(&mut s, &spec, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(nba.num_states(), 1);
        assert!(nba.is_accepting(0));
        assert_eq!(nba.edges().len(), 1);
        let a = s.atom(0);
        assert_eq!(nba.edges()[0].label, a);
    }

    #[test]
    fn eventually_needs_two_states() {
        let mut spec = Spec::with_names(&["a"], &[]).unwrap();
        let a = spec.atom("a").unwrap();
        let f = spec.finally(a);
        spec.set_formula(f);
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let nba = translate(&mut s, &spec, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(nba.num_states(), 2);
        assert!(nba.accepts_lasso(&s, &[vec![false]], &[vec![true], vec![false]]));
        assert!(!nba.accepts_lasso(&s, &[], &[vec![false]]));
    }

    #[test]
    fn contradiction_gives_empty_automaton() {
        let mut spec = Spec::with_names(&[], &["o"]).unwrap();
        let o = spec.atom("o").unwrap();
        let no = spec.not(o);
        let c = spec.and(o, no);
        let g = spec.globally(c);
        spec.set_formula(g);
        let mut s = Session::with_names(&[], &["o"]).unwrap();
        let nba = translate(&mut s, &spec, DEFAULT_STATE_CAP).unwrap();
        assert_eq!(nba, Nba::empty());
    }

    #[test]
    fn state_cap_is_enforced() {
        let mut spec = Spec::with_names(&["a"], &[]).unwrap();
        let a = spec.atom("a").unwrap();
        let mut f = a;
        for _ in 0..6 {
            f = spec.next(f);
        }
        spec.set_formula(f);
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        assert_eq!(translate(&mut s, &spec, 3), Err(TranslateError::StateCap(3)));
    }

    #[test]
    fn vocabulary_must_match() {
        let (_, spec) = spec_g_a();
        let mut s = Session::with_names(&["b"], &[]).unwrap();
        assert_eq!(
            translate(&mut s, &spec, DEFAULT_STATE_CAP),
            Err(TranslateError::VocabMismatch)
        );
    }
}
