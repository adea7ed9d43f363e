//! Composition of the two machines into one sequential circuit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::automata::{check_transducer, Nba, Transducer, TransducerCheck};
use crate::bdd::VarId;
use crate::depsynth::aig::lit_value;
use crate::depsynth::{Aig, BddToAig, Lit, TxCircuit, LIVE};
use crate::nondep::MealyTY;
use crate::session::Session;

/// Circuit with one input per environment atom, one output per system atom in
/// declaration order, and a final [`LIVE`] output.
#[derive(Debug, Clone)]
pub struct Controller {
    pub aig: Aig,
}

fn state_bits(m: usize) -> usize {
    let mut w = 0;
    while (1usize << w) < m {
        w += 1;
    }
    w
}

/// Builds the controller from the non-dependent machine and, if any, the circuit
/// for the dependent outputs.
pub fn compose(session: &Session, t_y: &MealyTY, t_x: Option<&TxCircuit>) -> Controller {
    let vocab = &session.vocab;
    let mut aig = Aig::new();
    let mut var_lits: Vec<Option<Lit>> = vec![None; session.bdd.var_count()];
    let mut atom_lits: Vec<Option<Lit>> = vec![None; vocab.num_atoms()];
    for a in vocab.input_atoms() {
        let l = aig.add_input(vocab.atom_name(a));
        var_lits[vocab.var(a).index()] = Some(l);
        atom_lits[a] = Some(l);
    }
    let width = state_bits(t_y.num_states());
    let latches: Vec<(usize, Lit)> = (0..width).map(|b| aig.add_latch(&format!("s{b}"), false)).collect();
    let decode: Vec<Lit> = (0..t_y.num_states())
        .map(|s| {
            let lits: Vec<Lit> = latches
                .iter()
                .enumerate()
                .map(|(b, &(_, l))| l.negate_if(s >> b & 1 == 0))
                .collect();
            aig.and_all(lits)
        })
        .collect();
    let lookup = |v: VarId| var_lits[v.index()].expect("machine reads inputs only");
    let mut comp = BddToAig::new(&session.bdd, &lookup);
    let mut y_terms = vec![Vec::new(); t_y.outputs.len()];
    let mut bit_terms = vec![Vec::new(); width];
    for (s, st) in t_y.states.iter().enumerate() {
        for (k, &f) in st.outputs.iter().enumerate() {
            let fl = comp.compile(&mut aig, f);
            y_terms[k].push(aig.and(decode[s], fl));
        }
        for &(t, g) in &st.next {
            let gl = comp.compile(&mut aig, g);
            let on = aig.and(decode[s], gl);
            for (b, terms) in bit_terms.iter_mut().enumerate() {
                if t >> b & 1 == 1 {
                    terms.push(on);
                }
            }
        }
    }
    for ((idx, _), terms) in latches.iter().zip(bit_terms) {
        let n = aig.or_all(terms);
        aig.set_latch_next(*idx, n);
    }
    for (&a, terms) in t_y.outputs.iter().zip(y_terms) {
        atom_lits[a] = Some(aig.or_all(terms));
    }
    let live = match t_x {
        Some(tx) => {
            let map: Vec<Lit> = tx
                .drivers
                .iter()
                .map(|&a| atom_lits[a].expect("driver atom is an input or a machine output"))
                .collect();
            let outs = aig.import(&tx.aig, &map);
            for (&a, &l) in tx.xs.iter().zip(&outs) {
                atom_lits[a] = Some(l);
            }
            *outs.last().expect("live output")
        }
        None => Lit::TRUE,
    };
    for a in vocab.output_atoms() {
        let l = atom_lits[a].expect("every output is driven");
        aig.add_output(vocab.atom_name(a), l);
    }
    aig.add_output(LIVE, live);
    Controller { aig }
}

impl Controller {
    pub fn from_aig(aig: Aig) -> Controller {
        Controller { aig }
    }

    pub fn num_system_outputs(&self) -> usize {
        self.aig.outputs().len() - 1
    }

    /// Outputs for each letter of `word`, stopping after the first ⊥.
    pub fn simulate(&self, word: &[Vec<bool>]) -> Vec<Option<Vec<bool>>> {
        let mut state = self.aig.reset_state();
        let mut res = Vec::with_capacity(word.len());
        for inp in word {
            match self.step(&state, inp) {
                Some((o, next)) => {
                    res.push(Some(o));
                    state = next;
                }
                None => {
                    res.push(None);
                    break;
                }
            }
        }
        res
    }

    /// Value of every output literal, including [`LIVE`], without the latch update.
    pub fn outputs_at(&self, latches: &[bool], input: &[bool]) -> Vec<bool> {
        let val = self.aig.eval_nodes(input, latches);
        self.aig.outputs().iter().map(|&(l, _)| lit_value(&val, l)).collect()
    }
}

impl Transducer for Controller {
    type State = Vec<bool>;

    fn num_inputs(&self) -> usize {
        self.aig.inputs().len()
    }

    fn num_outputs(&self) -> usize {
        self.num_system_outputs()
    }

    fn initial(&self) -> Vec<bool> {
        self.aig.reset_state()
    }

    fn step(&self, state: &Vec<bool>, input: &[bool]) -> Option<(Vec<bool>, Vec<bool>)> {
        let (mut outs, next) = self.aig.step(input, state);
        let live = outs.pop().expect("live output");
        live.then_some((outs, next))
    }
}

/// Closed-loop check against an automaton for the negated specification.
pub fn check(session: &Session, controller: &Controller, neg: &Nba) -> TransducerCheck {
    check_transducer(controller, neg, session)
}

/// True when the controller never reaches ⊥ and no closed-loop word violates the
/// specification.
pub fn verify(session: &Session, controller: &Controller, neg: &Nba) -> bool {
    let c = check(session, controller, neg);
    !c.reaches_bottom && !c.accepting_lasso
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depsynth::build_lambda_circuit;
    use crate::nondep::MealyState;

    #[test]
    fn state_width() {
        assert_eq!(state_bits(1), 0);
        assert_eq!(state_bits(2), 1);
        assert_eq!(state_bits(3), 2);
        assert_eq!(state_bits(4), 2);
        assert_eq!(state_bits(5), 3);
    }

    #[test]
    fn toggling_machine() {
        // o flips every step regardless of i
        let s = Session::with_names(&["i"], &["o"]).unwrap();
        let t = s.bdd.tt();
        let f = s.bdd.ff();
        let m = MealyTY {
            outputs: vec![1],
            states: vec![
                MealyState { outputs: vec![f], next: vec![(1, t)] },
                MealyState { outputs: vec![t], next: vec![(0, t)] },
            ],
        };
        let c = compose(&s, &m, None);
        let out = c.simulate(&[vec![true], vec![false], vec![true]]);
        assert_eq!(out, vec![Some(vec![false]), Some(vec![true]), Some(vec![false])]);
    }

    #[test]
    fn dependent_copy() {
        let mut s = Session::with_names(&["i"], &["o"]).unwrap();
        let i = s.atom(0);
        let o = s.atom(1);
        let l = s.bdd.iff(o, i);
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, l);
        let tx = build_lambda_circuit(&mut s, &n, &[1]);
        let c = compose(&s, &MealyTY::trivial(&s), Some(&tx));
        let out = c.simulate(&[vec![true], vec![false]]);
        assert_eq!(out, vec![Some(vec![true]), Some(vec![false])]);
    }
}
