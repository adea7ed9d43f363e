//! Closed-loop checks of a Mealy transducer against a Büchi automaton.

use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hash;

use hashbrown::HashMap;

use super::{scc, Nba};
use crate::session::{bits, Session};

/// Deterministic Mealy machine reading inputs and producing outputs.
///
/// `step` returns `None` when the machine has no valid output (⊥).
pub trait Transducer {
    type State: Clone + Eq + Hash;

    fn num_inputs(&self) -> usize;
    fn num_outputs(&self) -> usize;
    fn initial(&self) -> Self::State;
    fn step(&self, state: &Self::State, input: &[bool]) -> Option<(Vec<bool>, Self::State)>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransducerCheck {
    /// Some input sequence drives the transducer into ⊥.
    pub reaches_bottom: bool,
    /// The product with the automaton has an accepting lasso.
    pub accepting_lasso: bool,
    pub product_states: usize,
}

/// Explores the product of `t` with `nba` over every input letter.
///
/// # Panics
/// If the transducer's alphabet does not match the session vocabulary.
pub fn check_transducer<T: Transducer>(t: &T, nba: &Nba, session: &Session) -> TransducerCheck {
    let ni = session.vocab.num_inputs();
    assert_eq!(t.num_inputs(), ni, "transducer input count");
    assert_eq!(t.num_outputs(), session.vocab.num_outputs(), "transducer output count");
    let mut ids: HashMap<(T::State, usize), usize> = HashMap::new();
    let mut nodes: Vec<(T::State, usize)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut reaches_bottom = false;
    let start = (t.initial(), nba.initial());
    ids.insert(start.clone(), 0);
    nodes.push(start);
    let inputs: Vec<Vec<bool>> = (0..1u64 << ni).map(|k| bits(k, ni)).collect();
    let mut i = 0;
    while i < nodes.len() {
        let (ts, q) = nodes[i].clone();
        let mut out = Vec::new();
        for inp in &inputs {
            let Some((o, ts2)) = t.step(&ts, inp) else {
                reaches_bottom = true;
                continue;
            };
            let mut letter = inp.clone();
            letter.extend_from_slice(&o);
            for q2 in nba.successors(session, q, &letter) {
                let key = (ts2.clone(), q2);
                let id = match ids.get(&key) {
                    Some(&id) => id,
                    None => {
                        let id = nodes.len();
                        ids.insert(key.clone(), id);
                        nodes.push(key);
                        id
                    }
                };
                out.push(id);
            }
        }
        succ.push(out);
        i += 1;
    }
    let comp = scc(&succ);
    let accepting_lasso = (0..nodes.len()).any(|v| nba.is_accepting(nodes[v].1) && comp.nontrivial[comp.id[v]]);
    TransducerCheck {
        reaches_bottom,
        accepting_lasso,
        product_states: nodes.len(),
    }
}

/// True when no run of `t` is accepted by `nba`.
pub fn product_empty<T: Transducer>(t: &T, nba: &Nba, session: &Session) -> bool {
    !check_transducer(t, nba, session).accepting_lasso
}

/// Transducer given by a table, used in tests and for small explicit machines.
#[derive(Debug, Clone)]
pub struct TableTransducer {
    pub num_inputs: usize,
    pub num_outputs: usize,
    /// `table[state][input_index] = (outputs, next)`
    pub table: Vec<Vec<Option<(Vec<bool>, usize)>>>,
}

impl Transducer for TableTransducer {
    type State = usize;

    fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    fn num_outputs(&self) -> usize {
        self.num_outputs
    }

    fn initial(&self) -> usize {
        0
    }

    fn step(&self, s: &usize, input: &[bool]) -> Option<(Vec<bool>, usize)> {
        let idx = input.iter().enumerate().fold(0usize, |acc, (k, &b)| acc | (usize::from(b) << k));
        self.table[*s][idx].clone()
    }
}

impl TableTransducer {
    /// One-state machine computing `outputs = f(inputs)`.
    pub fn stateless(num_inputs: usize, num_outputs: usize, f: impl Fn(&[bool]) -> Vec<bool>) -> Self {
        let row = (0..1u64 << num_inputs)
            .map(|k| Some((f(&bits(k, num_inputs)), 0)))
            .collect();
        TableTransducer {
            num_inputs,
            num_outputs,
            table: vec![row],
        }
    }
}
