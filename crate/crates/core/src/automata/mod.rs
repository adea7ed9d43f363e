//! Büchi automata with BDD-labelled edges.

mod product;
mod translate;

pub use product::{check_transducer, product_empty, TableTransducer, Transducer, TransducerCheck};
pub use translate::{translate, TranslateError, DEFAULT_STATE_CAP};

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use hashbrown::HashMap;

use crate::bdd::{Bdd, BddManager};
use crate::session::Session;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub label: Bdd,
}

/// State-based Büchi automaton. State 0 is initial.
///
/// There is at most one edge per `(src, dst)`; adding a parallel edge disjoins the
/// labels. Unsatisfiable labels are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nba {
    accepting: Vec<bool>,
    edges: Vec<Edge>,
    index: HashMap<(usize, usize), usize>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
}

impl Nba {
    pub fn new(num_states: usize) -> Nba {
        assert!(num_states > 0, "an automaton has at least its initial state");
        Nba {
            accepting: vec![false; num_states],
            edges: Vec::new(),
            index: HashMap::new(),
            out: vec![Vec::new(); num_states],
            inc: vec![Vec::new(); num_states],
        }
    }

    /// The automaton with the empty language.
    pub fn empty() -> Nba {
        Nba::new(1)
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn add_state(&mut self) -> usize {
        self.accepting.push(false);
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting[s]
    }

    pub fn set_accepting(&mut self, s: usize, acc: bool) {
        self.accepting[s] = acc;
    }

    pub fn accepting_states(&self) -> Vec<usize> {
        (0..self.num_states()).filter(|&s| self.accepting[s]).collect()
    }

    pub fn add_edge(&mut self, mgr: &mut BddManager, src: usize, dst: usize, label: Bdd) {
        if !mgr.is_sat(label) {
            return;
        }
        if let Some(&e) = self.index.get(&(src, dst)) {
            let l = mgr.or(self.edges[e].label, label);
            self.edges[e].label = l;
            return;
        }
        let e = self.edges.len();
        self.edges.push(Edge { src, dst, label });
        self.index.insert((src, dst), e);
        self.out[src].push(e);
        self.inc[dst].push(e);
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, src: usize, dst: usize) -> Option<&Edge> {
        self.index.get(&(src, dst)).map(|&e| &self.edges[e])
    }

    pub fn out_edges(&self, s: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.out[s].iter().map(move |&e| &self.edges[e])
    }

    pub fn in_edges(&self, s: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.inc[s].iter().map(move |&e| &self.edges[e])
    }

    /// Replaces every label by `f(label)`, dropping edges that become unsatisfiable.
    pub fn map_labels(&self, mgr: &mut BddManager, mut f: impl FnMut(&mut BddManager, Bdd) -> Bdd) -> Nba {
        let mut out = Nba::new(self.num_states());
        out.accepting = self.accepting.clone();
        for e in &self.edges {
            let l = f(mgr, e.label);
            out.add_edge(mgr, e.src, e.dst, l);
        }
        out
    }

    /// True when no accepting run exists.
    pub fn is_empty(&self) -> bool {
        let t = self.trim();
        t.edges.is_empty()
    }

    /// Keeps the states that are reachable from the initial state and can reach a
    /// cycle through an accepting state. States keep their relative order.
    pub fn trim(&self) -> Nba {
        let n = self.num_states();
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|s| self.out_edges(s).map(|e| e.dst).collect())
            .collect();
        let reach = reachable_from(&succ, &[0]);
        let comp = scc(&succ);
        let mut good_comp = vec![false; comp.count];
        for s in 0..n {
            if self.accepting[s] && reach[s] && comp.nontrivial[comp.id[s]] {
                good_comp[comp.id[s]] = true;
            }
        }
        let seeds: Vec<usize> = (0..n).filter(|&s| good_comp[comp.id[s]]).collect();
        let mut pred = vec![Vec::new(); n];
        for (s, ss) in succ.iter().enumerate() {
            for &d in ss {
                pred[d].push(s);
            }
        }
        let coreach = reachable_from(&pred, &seeds);
        let keep: Vec<bool> = (0..n).map(|s| reach[s] && coreach[s]).collect();
        if !keep[0] {
            return Nba::empty();
        }
        let mut map = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if keep[s] {
                map[s] = next;
                next += 1;
            }
        }
        let mut out = Nba::new(next);
        for s in 0..n {
            if keep[s] {
                out.accepting[map[s]] = self.accepting[s];
            }
        }
        for e in &self.edges {
            if keep[e.src] && keep[e.dst] {
                let id = out.edges.len();
                let ne = Edge {
                    src: map[e.src],
                    dst: map[e.dst],
                    label: e.label,
                };
                out.edges.push(ne);
                out.index.insert((ne.src, ne.dst), id);
                out.out[ne.src].push(id);
                out.inc[ne.dst].push(id);
            }
        }
        out
    }

    /// Successor states on a concrete letter.
    pub fn successors(&self, session: &Session, s: usize, letter: &[bool]) -> Vec<usize> {
        self.out_edges(s)
            .filter(|e| session.eval_letter(e.label, letter))
            .map(|e| e.dst)
            .collect()
    }

    /// Membership of the lasso word `stem · cycle^ω`.
    pub fn accepts_lasso(&self, session: &Session, stem: &[Vec<bool>], cycle: &[Vec<bool>]) -> bool {
        assert!(!cycle.is_empty(), "lasso cycle must be non-empty");
        let len = stem.len() + cycle.len();
        let letter = |p: usize| if p < stem.len() { &stem[p] } else { &cycle[p - stem.len()] };
        let next_pos = |p: usize| if p + 1 < len { p + 1 } else { stem.len() };
        // product node = state * len + position
        let n = self.num_states() * len;
        let mut succ = vec![Vec::new(); n];
        for q in 0..self.num_states() {
            for p in 0..len {
                for d in self.successors(session, q, letter(p)) {
                    succ[q * len + p].push(d * len + next_pos(p));
                }
            }
        }
        let reach = reachable_from(&succ, &[0]);
        let comp = scc(&succ);
        (0..n).any(|v| {
            reach[v]
                && self.accepting[v / len]
                && v % len >= stem.len()
                && comp.nontrivial[comp.id[v]]
        })
    }

    /// Sum of decision nodes over the distinct edge labels.
    pub fn label_size(&self, mgr: &BddManager) -> usize {
        let mut seen = hashbrown::HashSet::new();
        self.edges
            .iter()
            .filter(|e| seen.insert(e.label))
            .map(|e| mgr.internal_node_count(e.label))
            .sum()
    }

    pub fn to_dot(&self, session: &Session) -> String {
        let mut s = String::from("digraph nba {\n  init [shape=point];\n  init -> q0;\n");
        for q in 0..self.num_states() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  q{q} [shape={shape}];");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  q{} -> q{} [label=\"{}\"];",
                e.src,
                e.dst,
                session.bdd.to_expr(e.label).replace('"', "\\\"")
            );
        }
        s.push_str("}\n");
        s
    }
}

pub(crate) fn reachable_from(succ: &[Vec<usize>], seeds: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack: Vec<usize> = seeds.to_vec();
    while let Some(v) = stack.pop() {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        stack.extend(succ[v].iter().copied().filter(|&d| !seen[d]));
    }
    seen
}

pub(crate) struct Sccs {
    pub id: Vec<usize>,
    pub count: usize,
    /// Component has a cycle (more than one node, or a self-loop).
    pub nontrivial: Vec<bool>,
}

/// Iterative Tarjan.
pub(crate) fn scc(succ: &[Vec<usize>]) -> Sccs {
    let n = succ.len();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut id = vec![0; n];
    let mut count = 0;
    let mut sizes = Vec::new();
    let mut counter = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < succ[v].len() {
                let w = succ[v][top.1];
                top.1 += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut size = 0;
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        id[w] = count;
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    sizes.push(size);
                    count += 1;
                }
            }
        }
    }
    let mut nontrivial: Vec<bool> = sizes.iter().map(|&s| s > 1).collect();
    for v in 0..n {
        if succ[v].contains(&v) {
            nontrivial[id[v]] = true;
        }
    }
    Sccs {
        id,
        count,
        nontrivial,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_edges_merge() {
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let a = s.atom(0);
        let na = s.bdd.not(a);
        let mut n = Nba::new(1);
        n.add_edge(&mut s.bdd, 0, 0, a);
        n.add_edge(&mut s.bdd, 0, 0, na);
        let ff = s.bdd.ff();
        n.add_edge(&mut s.bdd, 0, 0, ff);
        assert_eq!(n.edges().len(), 1);
        assert!(s.bdd.is_true(n.edges()[0].label));
    }

    #[test]
    fn trim_drops_unreachable_and_dead_states() {
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let t = s.bdd.tt();
        let mut n = Nba::new(4);
        n.set_accepting(1, true);
        n.set_accepting(2, true);
        n.add_edge(&mut s.bdd, 0, 1, t);
        n.add_edge(&mut s.bdd, 1, 1, t);
        n.add_edge(&mut s.bdd, 0, 2, t); // accepting but no cycle
        n.add_edge(&mut s.bdd, 3, 1, t); // unreachable
        let m = n.trim();
        assert_eq!(m.num_states(), 2);
        assert_eq!(m.edges().len(), 2);
        assert_eq!(m.trim(), m);
    }

    #[test]
    fn trim_of_empty_language_is_canonical_empty() {
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let t = s.bdd.tt();
        let mut n = Nba::new(2);
        n.add_edge(&mut s.bdd, 0, 1, t);
        n.add_edge(&mut s.bdd, 1, 1, t);
        assert_eq!(n.trim(), Nba::empty());
        assert!(n.is_empty());
    }

    #[test]
    fn lasso_membership() {
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let a = s.atom(0);
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, a);
        assert!(n.accepts_lasso(&s, &[], &[vec![true]]));
        assert!(!n.accepts_lasso(&s, &[vec![true]], &[vec![true], vec![false]]));
    }

    #[test]
    fn scc_marks_self_loops() {
        let succ = vec![vec![1], vec![1], vec![0, 2], vec![]];
        let c = scc(&succ);
        assert!(c.nontrivial[c.id[1]]);
        assert!(!c.nontrivial[c.id[3]]);
    }
}
