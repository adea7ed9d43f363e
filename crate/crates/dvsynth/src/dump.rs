//! Explicit state graph of a controller, serialized as JSON.

use std::collections::HashMap;

use dvsynth_core::automata::Transducer;
use dvsynth_core::controller::Controller;
use dvsynth_core::session::bits;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplicitMachine {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Latch valuations, state 0 is the reset state.
    pub states: Vec<Vec<bool>>,
    pub transitions: Vec<ExplicitTransition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExplicitTransition {
    pub from: usize,
    pub input: Vec<bool>,
    /// `None` when the controller has no valid output.
    pub output: Option<Vec<bool>>,
    pub to: Option<usize>,
}

/// Explores every latch valuation reachable from reset under all inputs.
pub fn explicit_machine(c: &Controller) -> ExplicitMachine {
    let ni = c.num_inputs();
    let mut ids: HashMap<Vec<bool>, usize> = HashMap::new();
    let mut states = vec![c.initial()];
    ids.insert(states[0].clone(), 0);
    let mut transitions = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let s = states[i].clone();
        for k in 0..1u64 << ni {
            let input = bits(k, ni);
            let (output, to) = match c.step(&s, &input) {
                Some((o, next)) => {
                    let id = *ids.entry(next.clone()).or_insert_with(|| {
                        states.push(next);
                        states.len() - 1
                    });
                    (Some(o), Some(id))
                }
                None => (None, None),
            };
            transitions.push(ExplicitTransition { from: i, input, output, to });
        }
        i += 1;
    }
    let aig = &c.aig;
    ExplicitMachine {
        inputs: aig.inputs().iter().map(|(_, n)| n.clone()).collect(),
        outputs: aig.outputs()[..c.num_system_outputs()].iter().map(|(_, n)| n.clone()).collect(),
        states,
        transitions,
    }
}

pub fn to_json(m: &ExplicitMachine) -> String {
    serde_json::to_string_pretty(m).expect("plain data serializes")
}
