//! Symbolic letters: the atoms of the Boolean algebra generated by edge labels.
//!
//! Letters inside one atom are indistinguishable to the automaton, so games and
//! determinization run over atoms instead of the full `2^|I ∪ Y|` alphabet.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::automata::Nba;
use crate::bdd::{Bdd, BddManager, VarId};
use crate::session::Session;

pub const DEFAULT_ATOM_CAP: usize = 1 << 10;

#[derive(Debug, Clone)]
pub struct Alphabet {
    /// Pairwise disjoint, covering `true`, over inputs and the remaining outputs.
    pub atoms: Vec<Bdd>,
    /// Pairwise disjoint input regions, covering `true`.
    pub classes: Vec<Bdd>,
    /// Atoms available to the system under each input class.
    pub class_atoms: Vec<Vec<usize>>,
}

/// Refines `true` by `preds`. `None` if more than `cap` parts arise.
pub fn refine(mgr: &mut BddManager, preds: impl IntoIterator<Item = Bdd>, cap: usize) -> Option<Vec<Bdd>> {
    let mut parts = vec![mgr.tt()];
    let mut seen = HashSet::new();
    for p in preds {
        if mgr.is_const(p) || !seen.insert(p) {
            continue;
        }
        let np = mgr.not(p);
        let mut next = Vec::with_capacity(parts.len() * 2);
        for &a in &parts {
            for side in [p, np] {
                let c = mgr.and(a, side);
                if mgr.is_sat(c) {
                    next.push(c);
                }
            }
        }
        if next.len() > cap {
            return None;
        }
        parts = next;
    }
    Some(parts)
}

impl Alphabet {
    /// Atoms of the labels of `nba` and the input classes they induce.
    pub fn new(session: &mut Session, nba: &Nba, cap: usize) -> Option<Alphabet> {
        let labels: Vec<Bdd> = nba.edges().iter().map(|e| e.label).collect();
        let mgr = &mut session.bdd;
        let atoms = refine(mgr, labels, cap)?;
        let outs: Vec<VarId> = session.vocab.output_vars();
        let shadows: Vec<Bdd> = atoms.iter().map(|&a| mgr.exists(a, &outs)).collect();
        let classes = refine(mgr, shadows.iter().copied(), cap)?;
        let class_atoms = classes
            .iter()
            .map(|&c| {
                (0..atoms.len())
                    .filter(|&a| {
                        let both = mgr.and(c, shadows[a]);
                        mgr.is_sat(both)
                    })
                    .collect()
            })
            .collect();
        Some(Alphabet {
            atoms,
            classes,
            class_atoms,
        })
    }

    /// Index of the atom containing a concrete letter.
    pub fn atom_of(&self, session: &Session, letter: &[bool]) -> usize {
        self.atoms
            .iter()
            .position(|&a| session.eval_letter(a, letter))
            .expect("atoms cover every letter")
    }

    /// `succ[atom][q]`: states reachable from `q` on any letter of the atom.
    pub fn successors(&self, mgr: &mut BddManager, nba: &Nba) -> Vec<Vec<Vec<usize>>> {
        self.atoms
            .iter()
            .map(|&a| {
                (0..nba.num_states())
                    .map(|q| {
                        let mut d: Vec<usize> = nba
                            .out_edges(q)
                            .filter(|e| {
                                let c = mgr.and(e.label, a);
                                mgr.is_sat(c)
                            })
                            .map(|e| e.dst)
                            .collect();
                        d.sort_unstable();
                        d
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_partition_the_labels() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let i = s.atom(0);
        let o = s.atom(1);
        let l = s.bdd.iff(o, i);
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, l);
        let a = Alphabet::new(&mut s, &n, 16).unwrap();
        assert_eq!(a.atoms.len(), 2);
        // each input value can pick either atom
        assert_eq!(a.classes.len(), 1);
        assert_eq!(a.class_atoms[0], vec![0, 1]);
        assert!(Alphabet::new(&mut s, &n, 1).is_none());
    }
}
