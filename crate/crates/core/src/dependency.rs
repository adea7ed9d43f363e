//! Detection of outputs that are uniquely determined at every step.
//!
//! Two states are compatible when some finite word reaches both. An output `z`
//! depends on a variable set `Y` when no compatible pair admits two outgoing letters
//! that agree on `Y` and disagree on `z`. Everything is decided with BDD
//! satisfiability over the edge labels and their primed copies.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::automata::Nba;
use crate::bdd::{Bdd, BddManager};
use crate::clock::Clock;
use crate::session::Session;

/// Default per-variable budget for the dependency search.
pub const DEFAULT_BUDGET_MS: u64 = 12_000;

/// Symmetric set of compatible state pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompatiblePairs {
    pairs: BTreeSet<(usize, usize)>,
}

impl CompatiblePairs {
    pub fn contains(&self, p: usize, q: usize) -> bool {
        self.pairs.contains(&(p, q))
    }

    /// Ordered pairs, both orientations included.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    /// Pairs with `p <= q`.
    pub fn unordered(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied().filter(|(p, q)| p <= q)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn insert(&mut self, p: usize, q: usize) -> bool {
        let fresh = self.pairs.insert((p, q));
        self.pairs.insert((q, p));
        fresh
    }
}

/// Worklist fixpoint from `(q0, q0)`: successors of a pair are compatible when
/// the two edge labels share a letter.
pub fn find_compatible_pairs(mgr: &mut BddManager, nba: &Nba) -> CompatiblePairs {
    let mut pairs = CompatiblePairs::default();
    if nba.edges().is_empty() {
        return pairs;
    }
    pairs.insert(0, 0);
    let mut work = vec![(0, 0)];
    while let Some((p, q)) = work.pop() {
        let outs_p: Vec<_> = nba.out_edges(p).copied().collect();
        let outs_q: Vec<_> = nba.out_edges(q).copied().collect();
        for e in &outs_p {
            for f in &outs_q {
                let (a, b) = (e.dst.min(f.dst), e.dst.max(f.dst));
                if pairs.contains(a, b) {
                    continue;
                }
                let both = mgr.and(e.label, f.label);
                if mgr.is_sat(both) && pairs.insert(a, b) {
                    work.push((a, b));
                }
            }
        }
    }
    pairs
}

/// Per-state disjunction of outgoing labels, plain and primed.
struct OutLabels {
    plain: Vec<Bdd>,
    primed: Vec<Bdd>,
}

impl OutLabels {
    fn new(session: &mut Session, nba: &Nba) -> Self {
        let map = session.vocab.prime_map();
        let mut plain = Vec::new();
        let mut primed = Vec::new();
        for s in 0..nba.num_states() {
            let labels: Vec<Bdd> = nba.out_edges(s).map(|e| e.label).collect();
            let b = session.bdd.or_all(labels);
            plain.push(b);
            primed.push(session.bdd.rename(b, &map).expect("prime map is injective"));
        }
        OutLabels { plain, primed }
    }
}

/// `⋀_{y∈Y} (y ↔ y') ∧ (z ↔ ¬z')`
fn collision_constraint(session: &mut Session, z: usize, y: &[usize]) -> Bdd {
    let mgr = &mut session.bdd;
    let zv = mgr.var(session.vocab.var(z));
    let zp = mgr.var(session.vocab.primed(z));
    let mut c = mgr.xor(zv, zp);
    for &a in y {
        let v = mgr.var(session.vocab.var(a));
        let p = mgr.var(session.vocab.primed(a));
        let eq = mgr.iff(v, p);
        c = mgr.and(c, eq);
    }
    c
}

fn colliding(mgr: &mut BddManager, out: &OutLabels, constraint: Bdd, p: usize, q: usize) -> bool {
    let left = mgr.and(out.plain[p], constraint);
    if !mgr.is_sat(left) {
        return false;
    }
    let both = mgr.and(left, out.primed[q]);
    mgr.is_sat(both)
}

/// Whether states `p` and `q` have outgoing letters agreeing on `y` and
/// disagreeing on `z`. Atoms are indices into the session vocabulary.
pub fn are_states_colliding(session: &mut Session, nba: &Nba, p: usize, q: usize, z: usize, y: &[usize]) -> bool {
    assert!(!y.contains(&z), "z must not be in Y");
    let out = OutLabels::new(session, nba);
    let c = collision_constraint(session, z, y);
    colliding(&mut session.bdd, &out, c, p, q)
}

/// `{z}` is automata-dependent on `y` when no compatible pair collides.
pub fn is_automata_dependent(session: &mut Session, nba: &Nba, z: usize, y: &[usize], pairs: &CompatiblePairs) -> bool {
    let out = OutLabels::new(session, nba);
    let c = collision_constraint(session, z, y);
    check_pairs(&mut session.bdd, &out, c, pairs, &mut || false) == Some(true)
}

/// `Some(dependent)`, or `None` when `expired` fired first.
fn check_pairs(
    mgr: &mut BddManager,
    out: &OutLabels,
    constraint: Bdd,
    pairs: &CompatiblePairs,
    expired: &mut dyn FnMut() -> bool,
) -> Option<bool> {
    for (p, q) in pairs.unordered() {
        if expired() {
            return None;
        }
        if colliding(mgr, out, constraint, p, q) {
            debug_assert!(colliding(mgr, out, constraint, q, p));
            return Some(false);
        }
        debug_assert!(!colliding(mgr, out, constraint, q, p));
    }
    Some(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarStatus {
    Dependent,
    NotDependent,
    SkippedBudget,
}

impl VarStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            VarStatus::Dependent => "dependent",
            VarStatus::NotDependent => "not-dependent",
            VarStatus::SkippedBudget => "skipped-budget",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarReport {
    pub atom: usize,
    pub name: String,
    pub status: VarStatus,
    pub micros: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyReport {
    /// One entry per tested output, in test order.
    pub vars: Vec<VarReport>,
    /// Dependent outputs in test order.
    pub dependent: Vec<usize>,
    /// Remaining outputs in declaration order.
    pub nondependent: Vec<usize>,
    pub num_pairs: usize,
    pub pairs_micros: u64,
    pub total_micros: u64,
}

impl DependencyReport {
    /// Report with no dependent outputs, used when the search is disabled.
    pub fn none(session: &Session) -> Self {
        DependencyReport {
            vars: Vec::new(),
            dependent: Vec::new(),
            nondependent: session.vocab.output_atoms().collect(),
            num_pairs: 0,
            pairs_micros: 0,
            total_micros: 0,
        }
    }
}

/// Greedy search for a maximal dependent set.
///
/// `order` lists output atoms. Each `z` is tested against every variable not yet
/// found dependent; a test that outlives `budget_us` marks `z` as skipped.
pub fn find_maximal_dependent_set(
    session: &mut Session,
    nba: &Nba,
    order: &[usize],
    budget_us: Option<u64>,
    clock: &dyn Clock,
) -> DependencyReport {
    let start = clock.now_us();
    let pairs = find_compatible_pairs(&mut session.bdd, nba);
    let pairs_micros = clock.now_us() - start;
    let out = OutLabels::new(session, nba);
    let atoms: Vec<usize> = (0..session.vocab.num_atoms()).collect();
    let mut dependent: Vec<usize> = Vec::new();
    let mut vars = Vec::new();
    for &z in order {
        assert!(session.vocab.is_output(z), "only outputs can be dependent");
        let t0 = clock.now_us();
        let y: Vec<usize> = atoms
            .iter()
            .copied()
            .filter(|a| *a != z && !dependent.contains(a))
            .collect();
        let c = collision_constraint(session, z, &y);
        let mut expired = || budget_us.is_some_and(|b| clock.now_us() - t0 > b);
        let status = match check_pairs(&mut session.bdd, &out, c, &pairs, &mut expired) {
            Some(true) => {
                dependent.push(z);
                VarStatus::Dependent
            }
            Some(false) => VarStatus::NotDependent,
            None => VarStatus::SkippedBudget,
        };
        vars.push(VarReport {
            atom: z,
            name: session.vocab.atom_name(z).into(),
            status,
            micros: clock.now_us() - t0,
        });
    }
    let nondependent = session
        .vocab
        .output_atoms()
        .filter(|a| !dependent.contains(a))
        .collect();
    DependencyReport {
        vars,
        dependent,
        nondependent,
        num_pairs: pairs.len(),
        pairs_micros,
        total_micros: clock.now_us() - start,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependencyStats {
    pub n_dependent: usize,
    pub n_outputs: usize,
    /// `n_dependent / n_outputs`, 0 when there are no outputs.
    pub ratio: f64,
    pub nba_states: usize,
    pub nba_edges: usize,
    pub total_ms: f64,
}

pub fn dependency_stats(report: &DependencyReport, nba: &Nba) -> DependencyStats {
    let n_dependent = report.dependent.len();
    let n_outputs = n_dependent + report.nondependent.len();
    DependencyStats {
        n_dependent,
        n_outputs,
        ratio: if n_outputs == 0 {
            0.0
        } else {
            n_dependent as f64 / n_outputs as f64
        },
        nba_states: nba.num_states(),
        nba_edges: nba.edges().len(),
        total_ms: report.total_micros as f64 / 1000.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::NoClock;

    /// Automaton with a single accepting state whose self-loop is `label`.
    fn single(s: &mut Session, label: Bdd) -> Nba {
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, label);
        n
    }

    #[test]
    fn copy_output_is_dependent() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let i = s.atom(0);
        let o = s.atom(1);
        let l = s.bdd.iff(o, i);
        let n = single(&mut s, l);
        let pairs = find_compatible_pairs(&mut s.bdd, &n);
        assert_eq!(pairs.len(), 1);
        assert!(is_automata_dependent(&mut s, &n, 1, &[0], &pairs));
    }

    #[test]
    fn free_output_is_not_dependent() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let t = s.bdd.tt();
        let n = single(&mut s, t);
        let r = find_maximal_dependent_set(&mut s, &n, &[1], None, &NoClock);
        assert!(r.dependent.is_empty());
        assert_eq!(r.vars[0].status, VarStatus::NotDependent);
        let st = dependency_stats(&r, &n);
        assert_eq!(st.ratio, 0.0);
    }

    #[test]
    fn zero_budget_skips() {
        struct Ticking(core::cell::Cell<u64>);
        impl Clock for Ticking {
            fn now_us(&self) -> u64 {
                let v = self.0.get();
                self.0.set(v + 10);
                v
            }
        }
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let i = s.atom(0);
        let o = s.atom(1);
        let l = s.bdd.iff(o, i);
        let n = single(&mut s, l);
        let r = find_maximal_dependent_set(&mut s, &n, &[1], Some(0), &Ticking(Default::default()));
        assert_eq!(r.vars[0].status, VarStatus::SkippedBudget);
        assert_eq!(r.nondependent, vec![1]);
    }

    #[test]
    fn deterministic_automaton_has_diagonal_pairs() {
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let a = s.atom(0);
        let na = s.bdd.not(a);
        let mut n = Nba::new(2);
        n.set_accepting(0, true);
        n.set_accepting(1, true);
        n.add_edge(&mut s.bdd, 0, 1, a);
        n.add_edge(&mut s.bdd, 0, 0, na);
        n.add_edge(&mut s.bdd, 1, 0, na);
        n.add_edge(&mut s.bdd, 1, 1, a);
        let pairs = find_compatible_pairs(&mut s.bdd, &n);
        let v: Vec<_> = pairs.iter().collect();
        assert_eq!(v, vec![(0, 0), (1, 1)]);
    }
}
