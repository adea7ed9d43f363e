//! Synthesis of the non-dependent outputs through a parity game.
//!
//! The projected automaton is determinized over its atoms. The environment picks
//! an input class, the system answers with an atom available under that class, and
//! the concrete output values are read off a Skolem function of the atom.

mod alphabet;
mod dpa;
mod game;

pub use alphabet::{refine, Alphabet, DEFAULT_ATOM_CAP};
pub use dpa::{determinize, minimize, Dpa};
pub use game::{zielonka, ParityGame, Player, Solution};

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use crate::automata::{Nba, Transducer};
use crate::bdd::{Bdd, VarId};
use crate::session::Session;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NondepError {
    #[error("more than {0} symbolic letters")]
    AtomCap(usize),
    #[error("parity automaton exceeds {0} states")]
    StateCap(usize),
}

/// Game arena: env node `d` for each DPA state, then one system node per
/// `(state, class)`.
#[derive(Debug, Clone)]
pub struct Arena {
    pub game: ParityGame,
    pub num_states: usize,
    pub num_classes: usize,
    /// For each system node, the atom behind each successor.
    pub moves: Vec<Vec<usize>>,
}

impl Arena {
    pub fn sys_node(&self, state: usize, class: usize) -> usize {
        self.num_states + state * self.num_classes + class
    }
}

pub fn build_game(dpa: &Dpa, alpha: &Alphabet) -> Arena {
    let n = dpa.num_states();
    let k = alpha.classes.len();
    let mut owner = vec![Player::Odd; n];
    let mut priority = dpa.priority.clone();
    let mut succ: Vec<Vec<usize>> = (0..n).map(|d| (0..k).map(|c| n + d * k + c).collect()).collect();
    let mut moves = Vec::with_capacity(n * k);
    for d in 0..n {
        for c in 0..k {
            owner.push(Player::Even);
            priority.push(dpa.priority[d]);
            let atoms = alpha.class_atoms[c].clone();
            succ.push(atoms.iter().map(|&a| dpa.trans[d][a]).collect());
            moves.push(atoms);
        }
    }
    Arena {
        game: ParityGame { owner, priority, succ },
        num_states: n,
        num_classes: k,
        moves,
    }
}

/// Mealy machine driving the non-dependent outputs. State 0 is initial.
#[derive(Debug, Clone)]
pub struct MealyTY {
    /// Output atoms driven by the machine.
    pub outputs: Vec<usize>,
    pub states: Vec<MealyState>,
}

#[derive(Debug, Clone)]
pub struct MealyState {
    /// One function over the inputs per driven output.
    pub outputs: Vec<Bdd>,
    /// Disjoint input guards covering `true`, with their target states.
    pub next: Vec<(usize, Bdd)>,
}

impl MealyTY {
    /// Machine with no outputs and one state.
    pub fn trivial(session: &Session) -> MealyTY {
        MealyTY {
            outputs: Vec::new(),
            states: vec![MealyState {
                outputs: Vec::new(),
                next: vec![(0, session.bdd.tt())],
            }],
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Output values and successor on a concrete input letter.
    pub fn step(&self, session: &Session, state: usize, input: &[bool]) -> (Vec<bool>, usize) {
        let ins: Vec<usize> = session.vocab.input_atoms().collect();
        let st = &self.states[state];
        let out = st
            .outputs
            .iter()
            .map(|&f| session.eval_partial(f, &ins, input))
            .collect();
        let next = st
            .next
            .iter()
            .find(|(_, g)| session.eval_partial(*g, &ins, input))
            .map(|(t, _)| *t)
            .expect("guards cover every input");
        (out, next)
    }
}

/// Outcome of the non-dependent phase.
#[derive(Debug, Clone)]
pub struct NondepResult {
    /// `None` when the environment wins.
    pub machine: Option<MealyTY>,
    pub num_atoms: usize,
    pub num_classes: usize,
    pub dpa_states: usize,
    pub game_nodes: usize,
}

/// Solves the game of `nba` (already projected) for the outputs `ys`.
pub fn solve_nondep(
    session: &mut Session,
    nba: &Nba,
    ys: &[usize],
    atom_cap: usize,
    state_cap: usize,
) -> Result<NondepResult, NondepError> {
    let alpha = Alphabet::new(session, nba, atom_cap).ok_or(NondepError::AtomCap(atom_cap))?;
    let succ = alpha.successors(&mut session.bdd, nba);
    let dpa = determinize(nba, &succ, state_cap).map_err(NondepError::StateCap)?;
    let arena = build_game(&dpa, &alpha);
    let sol = zielonka(&arena.game);
    let mut res = NondepResult {
        machine: None,
        num_atoms: alpha.atoms.len(),
        num_classes: alpha.classes.len(),
        dpa_states: dpa.num_states(),
        game_nodes: arena.game.num_nodes(),
    };
    if sol.winner[0] != Player::Even {
        return Ok(res);
    }
    res.machine = Some(extract_t_y(session, &alpha, &arena, &sol, ys));
    Ok(res)
}

/// Positional strategy of the system, restricted to the states it can reach.
pub fn extract_t_y(
    session: &mut Session,
    alpha: &Alphabet,
    arena: &Arena,
    sol: &Solution,
    ys: &[usize],
) -> MealyTY {
    assert_eq!(sol.winner[0], Player::Even, "extraction needs a winning initial state");
    let yvars: Vec<VarId> = session.vocab.vars_of(ys);
    let mut skolem: HashMap<usize, Vec<Bdd>> = HashMap::new();
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut order = vec![0usize];
    ids.insert(0, 0);
    let mut states = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let d = order[i];
        let mgr = &mut session.bdd;
        let mut outputs = vec![mgr.ff(); ys.len()];
        let mut next: Vec<(usize, Bdd)> = Vec::new();
        for (c, &class) in alpha.classes.iter().enumerate() {
            let node = arena.sys_node(d, c);
            let pick = sol.strategy[node].expect("system node in winning region has a move");
            let atom = arena.moves[node - arena.num_states][pick];
            let target = arena.game.succ[node][pick];
            let fs = skolem
                .entry(atom)
                .or_insert_with(|| mgr.skolem(alpha.atoms[atom], &yvars))
                .clone();
            for (k, f) in fs.into_iter().enumerate() {
                let g = mgr.and(class, f);
                outputs[k] = mgr.or(outputs[k], g);
            }
            let t = *ids.entry(target).or_insert_with(|| {
                order.push(target);
                order.len() - 1
            });
            match next.iter_mut().find(|(x, _)| *x == t) {
                Some(slot) => slot.1 = mgr.or(slot.1, class),
                None => next.push((t, class)),
            }
        }
        states.push(MealyState { outputs, next });
        i += 1;
    }
    MealyTY {
        outputs: ys.to_vec(),
        states,
    }
}

/// A [`MealyTY`] viewed as a transducer over all outputs, for the case where it
/// drives every output.
pub struct MealyView<'a> {
    pub machine: &'a MealyTY,
    pub session: &'a Session,
}

impl Transducer for MealyView<'_> {
    type State = usize;

    fn num_inputs(&self) -> usize {
        self.session.vocab.num_inputs()
    }

    fn num_outputs(&self) -> usize {
        self.machine.outputs.len()
    }

    fn initial(&self) -> usize {
        0
    }

    fn step(&self, s: &usize, input: &[bool]) -> Option<(Vec<bool>, usize)> {
        Some(self.machine.step(self.session, *s, input))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{check_transducer, translate};
    use crate::ltl::Spec;

    fn synth(spec: &Spec) -> (Session, Option<MealyTY>) {
        let mut s = Session::new(spec.inputs(), spec.outputs()).unwrap();
        let nba = translate(&mut s, spec, 1000).unwrap();
        let ys: Vec<usize> = s.vocab.output_atoms().collect();
        let r = solve_nondep(&mut s, &nba, &ys, 64, 1000).unwrap();
        (s, r.machine)
    }

    #[test]
    fn copy_spec_is_realizable() {
        let mut spec = Spec::with_names(&["i"], &["o"]).unwrap();
        let i = spec.atom("i").unwrap();
        let o = spec.atom("o").unwrap();
        let e = spec.iff(o, i);
        let g = spec.globally(e);
        spec.set_formula(g);
        let (mut s, m) = synth(&spec);
        let m = m.expect("realizable");
        assert_eq!(m.num_states(), 1);
        for v in [false, true] {
            assert_eq!(m.step(&s, 0, &[v]).0, vec![v]);
        }
        let neg = translate(&mut s, &spec.negate(), 100).unwrap();
        let c = check_transducer(&MealyView { machine: &m, session: &s }, &neg, &s);
        assert!(!c.accepting_lasso);
    }

    #[test]
    fn contradiction_is_unrealizable() {
        let mut spec = Spec::with_names(&[], &["o"]).unwrap();
        let o = spec.atom("o").unwrap();
        let no = spec.not(o);
        let c = spec.and(o, no);
        let g = spec.globally(c);
        spec.set_formula(g);
        assert!(synth(&spec).1.is_none());
    }

    #[test]
    fn predicting_the_next_input_is_unrealizable() {
        let mut spec = Spec::with_names(&["i"], &["o"]).unwrap();
        let i = spec.atom("i").unwrap();
        let o = spec.atom("o").unwrap();
        let xi = spec.next(i);
        let e = spec.iff(o, xi);
        let g = spec.globally(e);
        spec.set_formula(g);
        assert!(synth(&spec).1.is_none());
    }

    #[test]
    fn input_requirement_without_outputs_is_unrealizable() {
        let mut spec = Spec::with_names(&["i"], &[]).unwrap();
        let i = spec.atom("i").unwrap();
        let g = spec.globally(i);
        spec.set_formula(g);
        assert!(synth(&spec).1.is_none());
    }
}
