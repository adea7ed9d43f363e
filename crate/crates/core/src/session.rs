//! The propositional vocabulary of a synthesis problem and the BDD manager it lives in.
//!
//! Atoms are numbered inputs first, then outputs, in declaration order. Each atom
//! owns two BDD variables, the plain one and a primed copy placed right after it.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::bdd::{Bdd, BddError, BddManager, VarId};

#[derive(Debug, Clone)]
pub struct Vocab {
    inputs: Vec<String>,
    outputs: Vec<String>,
    vars: Vec<VarId>,
    primed: Vec<VarId>,
    atom_of: Vec<Option<(usize, bool)>>,
}

impl Vocab {
    pub fn declare(
        mgr: &mut BddManager,
        inputs: &[String],
        outputs: &[String],
    ) -> Result<Vocab, BddError> {
        let mut vars = Vec::new();
        let mut primed = Vec::new();
        for name in inputs.iter().chain(outputs) {
            vars.push(mgr.new_var(name)?);
            primed.push(mgr.new_var(&format!("{name}'"))?);
        }
        let mut atom_of = vec![None; mgr.var_count()];
        for (a, (&v, &p)) in vars.iter().zip(&primed).enumerate() {
            atom_of[v.index()] = Some((a, false));
            atom_of[p.index()] = Some((a, true));
        }
        Ok(Vocab {
            inputs: inputs.to_vec(),
            outputs: outputs.to_vec(),
            vars,
            primed,
            atom_of,
        })
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn num_atoms(&self) -> usize {
        self.vars.len()
    }

    pub fn input_atoms(&self) -> Range<usize> {
        0..self.inputs.len()
    }

    pub fn output_atoms(&self) -> Range<usize> {
        self.inputs.len()..self.vars.len()
    }

    pub fn is_output(&self, atom: usize) -> bool {
        atom >= self.inputs.len()
    }

    pub fn atom_name(&self, atom: usize) -> &str {
        if atom < self.inputs.len() {
            &self.inputs[atom]
        } else {
            &self.outputs[atom - self.inputs.len()]
        }
    }

    pub fn atom_by_name(&self, name: &str) -> Option<usize> {
        (0..self.num_atoms()).find(|&a| self.atom_name(a) == name)
    }

    pub fn var(&self, atom: usize) -> VarId {
        self.vars[atom]
    }

    pub fn primed(&self, atom: usize) -> VarId {
        self.primed[atom]
    }

    pub fn vars_of(&self, atoms: &[usize]) -> Vec<VarId> {
        atoms.iter().map(|&a| self.vars[a]).collect()
    }

    pub fn input_vars(&self) -> Vec<VarId> {
        self.input_atoms().map(|a| self.vars[a]).collect()
    }

    pub fn output_vars(&self) -> Vec<VarId> {
        self.output_atoms().map(|a| self.vars[a]).collect()
    }

    /// `(atom, is_primed)` for a variable of this vocabulary.
    pub fn atom_of_var(&self, v: VarId) -> Option<(usize, bool)> {
        self.atom_of.get(v.index()).copied().flatten()
    }

    /// Plain-to-primed renaming for every atom.
    pub fn prime_map(&self) -> Vec<(VarId, VarId)> {
        self.vars.iter().copied().zip(self.primed.iter().copied()).collect()
    }

    /// Expands a letter (one bool per atom) into a BDD assignment indexed by variable.
    pub fn assignment(&self, letter: &[bool]) -> Vec<bool> {
        let mut a = vec![false; self.atom_of.len()];
        for (atom, &b) in letter.iter().enumerate() {
            a[self.vars[atom].index()] = b;
        }
        a
    }
}

/// A BDD manager together with the vocabulary declared in it.
#[derive(Debug)]
pub struct Session {
    pub bdd: BddManager,
    pub vocab: Vocab,
}

impl Session {
    pub fn new(inputs: &[String], outputs: &[String]) -> Result<Session, BddError> {
        let mut bdd = BddManager::new();
        let vocab = Vocab::declare(&mut bdd, inputs, outputs)?;
        Ok(Session { bdd, vocab })
    }

    /// Convenience constructor from string slices.
    pub fn with_names(inputs: &[&str], outputs: &[&str]) -> Result<Session, BddError> {
        let i: Vec<String> = inputs.iter().map(|s| String::from(*s)).collect();
        let o: Vec<String> = outputs.iter().map(|s| String::from(*s)).collect();
        Session::new(&i, &o)
    }

    /// Projection function of an atom.
    pub fn atom(&mut self, atom: usize) -> Bdd {
        let v = self.vocab.var(atom);
        self.bdd.var(v)
    }

    pub fn atom_lit(&mut self, atom: usize, positive: bool) -> Bdd {
        let v = self.vocab.var(atom);
        self.bdd.literal(v, positive)
    }

    /// Cube fixing every atom to the given letter.
    pub fn letter_cube(&mut self, atoms: &[usize], values: &[bool]) -> Bdd {
        let lits: Vec<(VarId, bool)> = atoms
            .iter()
            .zip(values)
            .map(|(&a, &b)| (self.vocab.var(a), b))
            .collect();
        self.bdd.cube(&lits)
    }

    /// Evaluates a BDD over plain variables on a full letter.
    pub fn eval_letter(&self, f: Bdd, letter: &[bool]) -> bool {
        let vocab = &self.vocab;
        self.bdd.eval_with(f, |v| match vocab.atom_of_var(v) {
            Some((a, false)) => letter[a],
            _ => false,
        })
    }

    /// Evaluates a BDD whose support lies in `atoms`, reading `values[k]` for `atoms[k]`.
    pub fn eval_partial(&self, f: Bdd, atoms: &[usize], values: &[bool]) -> bool {
        let vocab = &self.vocab;
        self.bdd.eval_with(f, |v| match vocab.atom_of_var(v) {
            Some((a, false)) => atoms
                .iter()
                .position(|&x| x == a)
                .map(|k| values[k])
                .unwrap_or(false),
            _ => false,
        })
    }
}

/// Bits of `index`, least significant first, as a letter of width `width`.
pub fn bits(index: u64, width: usize) -> Vec<bool> {
    (0..width).map(|k| (index >> k) & 1 == 1).collect()
}
