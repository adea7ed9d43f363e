//! Synthesis of the dependent outputs.
//!
//! The reference machine runs the subset construction over the automaton and
//! reads the dependent outputs off the unique enabled letter. The circuit keeps
//! one latch per automaton state and computes the same thing symbolically.

pub mod aig;

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

pub use aig::{Aig, BddToAig, Lit};

use crate::automata::Nba;
use crate::bdd::{Bdd, VarId};
use crate::session::{bits, Session};

/// Name of the extra output that is low exactly when no valid output exists.
pub const LIVE: &str = "__live";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DepSynthError {
    #[error("outputs are not uniquely determined from states {states:?}")]
    NonUnique { states: Vec<usize>, letter: Vec<bool> },
    #[error("more than {0} letters to enumerate")]
    LetterCap(usize),
}

/// Atoms that drive the subset machine: inputs and non-dependent outputs.
pub fn driver_atoms(session: &Session, xs: &[usize]) -> Vec<usize> {
    (0..session.vocab.num_atoms()).filter(|a| !xs.contains(a)).collect()
}

/// One step of the subset construction on a letter over [`driver_atoms`].
///
/// `Ok(None)` means no edge is enabled (⊥).
pub fn tx_step(
    session: &mut Session,
    nba: &Nba,
    xs: &[usize],
    subset: &[usize],
    letter: &[bool],
) -> Result<Option<(Vec<bool>, Vec<usize>)>, DepSynthError> {
    let drivers = driver_atoms(session, xs);
    let cube = session.letter_cube(&drivers, letter);
    let dvars = session.vocab.vars_of(&drivers);
    let mgr = &mut session.bdd;
    let mut next = Vec::new();
    let mut allowed = mgr.ff();
    for &q in subset {
        for e in nba.out_edges(q) {
            let r = mgr.and(e.label, cube);
            if !mgr.is_sat(r) {
                continue;
            }
            next.push(e.dst);
            let rx = mgr.exists(r, &dvars);
            allowed = mgr.or(allowed, rx);
        }
    }
    if next.is_empty() {
        return Ok(None);
    }
    next.sort_unstable();
    next.dedup();
    let cubes = mgr.cubes(allowed);
    if cubes.len() != 1 || cubes[0].len() != xs.len() {
        return Err(DepSynthError::NonUnique {
            states: subset.to_vec(),
            letter: letter.to_vec(),
        });
    }
    let xvars = session.vocab.vars_of(xs);
    let values = xvars
        .iter()
        .map(|v| cubes[0].iter().find(|(w, _)| w == v).map(|(_, b)| *b).expect("full cube"))
        .collect();
    Ok(Some((values, next)))
}

/// Subset-construction transducer, fully enumerated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitTX {
    pub xs: Vec<usize>,
    pub drivers: Vec<usize>,
    /// Reachable subsets; index 0 is `{q0}`.
    pub states: Vec<Vec<usize>>,
    /// `trans[state][letter index]`, `None` for ⊥.
    pub trans: Vec<Vec<Option<(Vec<bool>, usize)>>>,
}

impl ExplicitTX {
    pub fn state_of(&self, subset: &[usize]) -> Option<usize> {
        self.states.iter().position(|s| s == subset)
    }

    pub fn letter_index(letter: &[bool]) -> usize {
        letter.iter().enumerate().fold(0, |acc, (k, &b)| acc | (usize::from(b) << k))
    }
}

pub fn build_explicit_t_x(session: &mut Session, nba: &Nba, xs: &[usize], letter_cap: usize) -> Result<ExplicitTX, DepSynthError> {
    let drivers = driver_atoms(session, xs);
    if drivers.len() >= usize::BITS as usize || 1usize << drivers.len() > letter_cap {
        return Err(DepSynthError::LetterCap(letter_cap));
    }
    let letters: Vec<Vec<bool>> = (0..1u64 << drivers.len()).map(|k| bits(k, drivers.len())).collect();
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut states = vec![vec![nba.initial()]];
    ids.insert(states[0].clone(), 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let u = states[i].clone();
        let mut row = Vec::with_capacity(letters.len());
        for l in &letters {
            let r = tx_step(session, nba, xs, &u, l)?.map(|(out, next)| {
                let id = *ids.entry(next.clone()).or_insert_with(|| {
                    states.push(next);
                    states.len() - 1
                });
                (out, id)
            });
            row.push(r);
        }
        trans.push(row);
        i += 1;
    }
    Ok(ExplicitTX {
        xs: xs.to_vec(),
        drivers,
        states,
        trans,
    })
}

/// Sequential circuit for the dependent outputs.
///
/// Inputs are the driver atoms, latch `p_q` tracks whether automaton state `q` is
/// in the current subset, outputs are the dependent atoms followed by [`LIVE`].
#[derive(Debug, Clone)]
pub struct TxCircuit {
    pub aig: Aig,
    pub xs: Vec<usize>,
    pub drivers: Vec<usize>,
}

impl TxCircuit {
    /// `(dependent outputs, live, next latches)`.
    pub fn step(&self, letter: &[bool], latches: &[bool]) -> (Vec<bool>, bool, Vec<bool>) {
        let (mut outs, next) = self.aig.step(letter, latches);
        let live = outs.pop().expect("live output");
        (outs, live, next)
    }

    pub fn subset(latches: &[bool]) -> Vec<usize> {
        (0..latches.len()).filter(|&q| latches[q]).collect()
    }
}

struct CircuitBuilder<'a> {
    session: &'a mut Session,
    nba: &'a Nba,
    xs: Vec<usize>,
    drivers: Vec<usize>,
    aig: Aig,
    /// AIG literal per variable index; unused variables map to `None`.
    lits: Vec<Option<Lit>>,
    latches: Vec<(usize, Lit)>,
    memo: HashMap<u32, Lit>,
    /// `∃X. B` per distinct label.
    projected: HashMap<u32, Bdd>,
    skolem: HashMap<u32, Vec<Bdd>>,
}

impl<'a> CircuitBuilder<'a> {
    fn new(session: &'a mut Session, nba: &'a Nba, xs: &[usize]) -> Self {
        let drivers = driver_atoms(session, xs);
        let mut aig = Aig::new();
        let mut lits = vec![None; session.bdd.var_count()];
        for &a in &drivers {
            let l = aig.add_input(session.vocab.atom_name(a));
            lits[session.vocab.var(a).index()] = Some(l);
        }
        let latches = (0..nba.num_states())
            .map(|q| aig.add_latch(&alloc::format!("p{q}"), q == nba.initial()))
            .collect();
        CircuitBuilder {
            session,
            nba,
            xs: xs.to_vec(),
            drivers,
            aig,
            lits,
            latches,
            memo: HashMap::new(),
            projected: HashMap::new(),
            skolem: HashMap::new(),
        }
    }

    fn compile(&mut self, f: Bdd) -> Lit {
        let lits = &self.lits;
        let var_lit = |v: VarId| lits[v.index()].expect("variable is a circuit input");
        let memo = core::mem::take(&mut self.memo);
        let mut c = BddToAig::with_memo(&self.session.bdd, &var_lit, memo);
        let l = c.compile(&mut self.aig, f);
        self.memo = c.into_memo();
        l
    }

    fn project(&mut self, b: Bdd) -> Bdd {
        if let Some(&p) = self.projected.get(&b.node_id()) {
            return p;
        }
        // one variable at a time from the back, the order the Skolem step reuses
        let xvars = self.session.vocab.vars_of(&self.xs);
        let p = xvars.iter().rev().fold(b, |acc, &x| self.session.bdd.exists(acc, &[x]));
        self.projected.insert(b.node_id(), p);
        p
    }

    /// `n_q = ⋁_{(s,q)} p_s ∧ ∃X. B_(s,q)`
    fn delta(&mut self) -> Vec<Lit> {
        let mut next = Vec::with_capacity(self.nba.num_states());
        for q in 0..self.nba.num_states() {
            let ins: Vec<(usize, Bdd)> = self.nba.in_edges(q).map(|e| (e.src, e.label)).collect();
            let mut terms = Vec::new();
            for (s, b) in ins {
                let proj = self.project(b);
                let g = self.compile(proj);
                let p = self.latches[s].1;
                terms.push(self.aig.and(p, g));
            }
            next.push(self.aig.or_all(terms));
        }
        for (q, &n) in next.iter().enumerate() {
            let idx = self.latches[q].0;
            self.aig.set_latch_next(idx, n);
        }
        next
    }

    /// `x_k = ⋁_{(s,s')} p_s ∧ B[X ↦ F] ∧ F_k` with `F` the Skolem functions of the edge.
    ///
    /// `B[X ↦ F]` equals `∃X. B` for Skolem functions, so the guard is shared with
    /// the next-state logic.
    fn lambda(&mut self) -> Vec<Lit> {
        let xvars = self.session.vocab.vars_of(&self.xs);
        let mut outs = vec![Vec::new(); self.xs.len()];
        let edges: Vec<(usize, Bdd)> = self.nba.edges().iter().map(|e| (e.src, e.label)).collect();
        for (s, b) in edges {
            let fs = match self.skolem.get(&b.node_id()) {
                Some(fs) => fs.clone(),
                None => {
                    let fs = self.session.bdd.skolem(b, &xvars);
                    self.skolem.insert(b.node_id(), fs.clone());
                    fs
                }
            };
            let proj = self.project(b);
            let guard = self.compile(proj);
            let p = self.latches[s].1;
            let active = self.aig.and(p, guard);
            for (k, f) in fs.into_iter().enumerate() {
                let fl = self.compile(f);
                outs[k].push(self.aig.and(active, fl));
            }
        }
        outs.into_iter().map(|t| self.aig.or_all(t)).collect()
    }

    fn finish(mut self, xs_out: Vec<Lit>, next: &[Lit]) -> TxCircuit {
        for (&a, l) in self.xs.iter().zip(xs_out) {
            let name = String::from(self.session.vocab.atom_name(a));
            self.aig.add_output(&name, l);
        }
        let live = self.aig.or_all(next.iter().copied());
        self.aig.add_output(LIVE, live);
        TxCircuit {
            aig: self.aig,
            xs: self.xs,
            drivers: self.drivers,
        }
    }
}

/// Next-state part only: latches and the live output, no dependent outputs.
pub fn build_delta_circuit(session: &mut Session, nba: &Nba, xs: &[usize]) -> TxCircuit {
    let mut b = CircuitBuilder::new(session, nba, xs);
    let next = b.delta();
    b.finish(Vec::new(), &next)
}

/// Full circuit: next-state functions and dependent outputs.
pub fn build_lambda_circuit(session: &mut Session, nba: &Nba, xs: &[usize]) -> TxCircuit {
    let mut b = CircuitBuilder::new(session, nba, xs);
    let next = b.delta();
    let outs = b.lambda();
    b.finish(outs, &next)
}

/// As [`build_lambda_circuit`], reusing `projected = project(nba, xs)` for the guards.
pub fn build_lambda_circuit_projected(session: &mut Session, nba: &Nba, projected: &Nba, xs: &[usize]) -> TxCircuit {
    assert_eq!(nba.edges().len(), projected.edges().len(), "projection keeps edges");
    let mut b = CircuitBuilder::new(session, nba, xs);
    for (e, p) in nba.edges().iter().zip(projected.edges()) {
        b.projected.insert(e.label.node_id(), p.label);
    }
    let next = b.delta();
    let outs = b.lambda();
    b.finish(outs, &next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn copy_automaton(s: &mut Session) -> Nba {
        let i = s.atom(0);
        let o = s.atom(1);
        let l = s.bdd.iff(o, i);
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, l);
        n
    }

    #[test]
    fn copy_machine_has_one_subset() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let n = copy_automaton(&mut s);
        let t = build_explicit_t_x(&mut s, &n, &[1], 1 << 10).unwrap();
        assert_eq!(t.states, vec![vec![0]]);
        assert_eq!(t.trans[0][0], Some((vec![false], 0)));
        assert_eq!(t.trans[0][1], Some((vec![true], 0)));
    }

    #[test]
    fn copy_circuit_outputs_the_input() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let n = copy_automaton(&mut s);
        let c = build_lambda_circuit(&mut s, &n, &[1]);
        let reset = c.aig.reset_state();
        for v in [false, true] {
            let (o, live, next) = c.step(&[v], &reset);
            assert_eq!(o, vec![v]);
            assert!(live);
            assert_eq!(next, vec![true]);
        }
    }

    #[test]
    fn true_loop_keeps_its_latch() {
        let mut s = Session::with_names(&["i"], &[]).unwrap();
        let t = s.bdd.tt();
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, t);
        let c = build_delta_circuit(&mut s, &n, &[]);
        let (idx, _) = (0, ());
        let latch = &c.aig.latches()[idx];
        assert_eq!(latch.next, Lit(2 * latch.node as u32));
    }

    #[test]
    fn free_output_is_not_unique() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let t = s.bdd.tt();
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, t);
        assert!(matches!(
            build_explicit_t_x(&mut s, &n, &[1], 16),
            Err(DepSynthError::NonUnique { .. })
        ));
    }
}
