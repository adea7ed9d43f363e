//! Erasing dependent outputs from edge labels.

use alloc::vec::Vec;

use crate::automata::Nba;
use crate::session::Session;

/// Replaces every label `B` by `∃X. B`. States and edges are kept one-to-one.
pub fn project(session: &mut Session, nba: &Nba, xs: &[usize]) -> Nba {
    let vars = session.vocab.vars_of(xs);
    // one variable at a time from the back, the order the Skolem step reuses
    nba.map_labels(&mut session.bdd, |mgr, l| vars.iter().rev().fold(l, |acc, &x| mgr.exists(acc, &[x])))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeRecord {
    pub states: usize,
    pub edges: usize,
    /// Decision nodes summed over distinct labels.
    pub before: usize,
    pub after: usize,
    /// `after - before` per edge, in edge order.
    pub per_edge: Vec<i64>,
}

/// Label sizes of an automaton and its projection.
pub fn projection_stats(session: &Session, before: &Nba, after: &Nba) -> SizeRecord {
    assert_eq!(before.edges().len(), after.edges().len(), "projection keeps edges");
    let mgr = &session.bdd;
    let per_edge = before
        .edges()
        .iter()
        .zip(after.edges())
        .map(|(a, b)| mgr.internal_node_count(b.label) as i64 - mgr.internal_node_count(a.label) as i64)
        .collect();
    SizeRecord {
        states: before.num_states(),
        edges: before.edges().len(),
        before: before.label_size(mgr),
        after: after.label_size(mgr),
        per_edge,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projecting_a_copy_gives_true() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let i = s.atom(0);
        let o = s.atom(1);
        let l = s.bdd.iff(o, i);
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, l);
        let p = project(&mut s, &n, &[1]);
        assert!(s.bdd.is_true(p.edges()[0].label));
        let st = projection_stats(&s, &n, &p);
        assert_eq!((st.before, st.after), (3, 0));
        let same = project(&mut s, &n, &[]);
        assert_eq!(same, n);
        assert_eq!(projection_stats(&s, &n, &same).per_edge, alloc::vec![0]);
    }
}
