//! And-inverter graphs with latches.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::bdd::{Bdd, BddManager, VarId};

/// `2 * node + negated`. Node 0 is constant false, so `Lit::FALSE = 0`, `Lit::TRUE = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(pub u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    pub fn negate_if(self, c: bool) -> Lit {
        if c {
            self.negate()
        } else {
            self
        }
    }
}

impl core::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        self.negate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AigNode {
    False,
    Input(usize),
    Latch(usize),
    And(Lit, Lit),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Latch {
    pub node: usize,
    pub next: Lit,
    pub reset: bool,
    pub name: String,
}

/// Nodes are stored in creation order; an and-gate only refers to older nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Aig {
    nodes: Vec<AigNode>,
    strash: HashMap<(Lit, Lit), Lit>,
    inputs: Vec<(usize, String)>,
    latches: Vec<Latch>,
    outputs: Vec<(Lit, String)>,
}

impl Default for Aig {
    fn default() -> Self {
        Self::new()
    }
}

impl Aig {
    pub fn new() -> Aig {
        Aig {
            nodes: vec![AigNode::False],
            strash: HashMap::new(),
            inputs: Vec::new(),
            latches: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn nodes(&self) -> &[AigNode] {
        &self.nodes
    }

    pub fn inputs(&self) -> &[(usize, String)] {
        &self.inputs
    }

    pub fn latches(&self) -> &[Latch] {
        &self.latches
    }

    pub fn outputs(&self) -> &[(Lit, String)] {
        &self.outputs
    }

    pub fn num_ands(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, AigNode::And(..))).count()
    }

    pub fn add_input(&mut self, name: &str) -> Lit {
        let node = self.nodes.len();
        self.nodes.push(AigNode::Input(self.inputs.len()));
        self.inputs.push((node, name.into()));
        Lit(2 * node as u32)
    }

    /// New latch whose next-state function is set later with [`Aig::set_latch_next`].
    pub fn add_latch(&mut self, name: &str, reset: bool) -> (usize, Lit) {
        let node = self.nodes.len();
        let idx = self.latches.len();
        self.nodes.push(AigNode::Latch(idx));
        self.latches.push(Latch {
            node,
            next: Lit::FALSE,
            reset,
            name: name.into(),
        });
        (idx, Lit(2 * node as u32))
    }

    pub fn set_latch_next(&mut self, latch: usize, next: Lit) {
        self.latches[latch].next = next;
    }

    pub fn add_output(&mut self, name: &str, lit: Lit) {
        self.outputs.push((lit, name.into()));
    }

    pub fn and(&mut self, a: Lit, b: Lit) -> Lit {
        let (a, b) = (a.min(b), a.max(b));
        if a == Lit::FALSE || a == b.negate() {
            return Lit::FALSE;
        }
        if a == Lit::TRUE || a == b {
            return b;
        }
        if let Some(&l) = self.strash.get(&(a, b)) {
            return l;
        }
        let node = self.nodes.len();
        self.nodes.push(AigNode::And(a, b));
        let l = Lit(2 * node as u32);
        self.strash.insert((a, b), l);
        l
    }

    pub fn or(&mut self, a: Lit, b: Lit) -> Lit {
        let n = self.and(!a, !b);
        !n
    }

    pub fn mux(&mut self, sel: Lit, hi: Lit, lo: Lit) -> Lit {
        if hi == lo {
            return hi;
        }
        let t = self.and(sel, hi);
        let e = self.and(!sel, lo);
        self.or(t, e)
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = Lit>) -> Lit {
        let mut acc = Lit::FALSE;
        for l in items {
            acc = self.or(acc, l);
        }
        acc
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = Lit>) -> Lit {
        let mut acc = Lit::TRUE;
        for l in items {
            acc = self.and(acc, l);
        }
        acc
    }

    /// Values of all nodes given input and latch values.
    pub fn eval_nodes(&self, inputs: &[bool], latches: &[bool]) -> Vec<bool> {
        let mut val = vec![false; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            val[i] = match *n {
                AigNode::False => false,
                AigNode::Input(k) => inputs[k],
                AigNode::Latch(k) => latches[k],
                AigNode::And(a, b) => lit_value(&val, a) && lit_value(&val, b),
            };
        }
        val
    }

    pub fn reset_state(&self) -> Vec<bool> {
        self.latches.iter().map(|l| l.reset).collect()
    }

    /// One clock cycle: `(outputs, next latch values)`.
    pub fn step(&self, inputs: &[bool], latches: &[bool]) -> (Vec<bool>, Vec<bool>) {
        let val = self.eval_nodes(inputs, latches);
        let outs = self.outputs.iter().map(|(l, _)| lit_value(&val, *l)).collect();
        let next = self.latches.iter().map(|l| lit_value(&val, l.next)).collect();
        (outs, next)
    }

    /// Copies `other` into `self`. Inputs of `other` are replaced by `input_map`;
    /// its latches become fresh latches here. Returns the translation of each of
    /// `other`'s outputs.
    pub fn import(&mut self, other: &Aig, input_map: &[Lit]) -> Vec<Lit> {
        assert_eq!(input_map.len(), other.inputs.len(), "input map covers every input");
        let mut map: Vec<Lit> = vec![Lit::FALSE; other.nodes.len()];
        let mut new_latches = Vec::new();
        for (i, n) in other.nodes.iter().enumerate() {
            map[i] = match *n {
                AigNode::False => Lit::FALSE,
                AigNode::Input(k) => input_map[k],
                AigNode::Latch(k) => {
                    let l = &other.latches[k];
                    let (idx, lit) = self.add_latch(&l.name, l.reset);
                    new_latches.push((idx, k));
                    lit
                }
                AigNode::And(a, b) => {
                    let x = map[a.node()].negate_if(a.is_negated());
                    let y = map[b.node()].negate_if(b.is_negated());
                    self.and(x, y)
                }
            };
        }
        let tr = |l: Lit, map: &[Lit]| map[l.node()].negate_if(l.is_negated());
        for (idx, k) in new_latches {
            let next = tr(other.latches[k].next, &map);
            self.set_latch_next(idx, next);
        }
        other.outputs.iter().map(|(l, _)| tr(*l, &map)).collect()
    }

    /// Restricts the graph to what the outputs and latches need, renumbering nodes
    /// as inputs, latches, then and-gates.
    pub fn compact(&self) -> Aig {
        let mut used = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = self.outputs.iter().map(|(l, _)| l.node()).collect();
        stack.extend(self.latches.iter().map(|l| l.node));
        stack.extend(self.latches.iter().map(|l| l.next.node()));
        while let Some(v) = stack.pop() {
            if used[v] {
                continue;
            }
            used[v] = true;
            match self.nodes[v] {
                AigNode::And(a, b) => {
                    stack.push(a.node());
                    stack.push(b.node());
                }
                AigNode::Latch(k) => stack.push(self.latches[k].next.node()),
                _ => {}
            }
        }
        let mut out = Aig::new();
        let mut map = vec![Lit::FALSE; self.nodes.len()];
        for (node, name) in &self.inputs {
            map[*node] = out.add_input(name);
        }
        let mut latch_ids = Vec::new();
        for l in &self.latches {
            let (idx, lit) = out.add_latch(&l.name, l.reset);
            map[l.node] = lit;
            latch_ids.push(idx);
        }
        for (i, n) in self.nodes.iter().enumerate() {
            if let AigNode::And(a, b) = *n {
                if used[i] {
                    let x = map[a.node()].negate_if(a.is_negated());
                    let y = map[b.node()].negate_if(b.is_negated());
                    map[i] = out.and(x, y);
                }
            }
        }
        let tr = |l: Lit| map[l.node()].negate_if(l.is_negated());
        for (l, idx) in self.latches.iter().zip(latch_ids) {
            out.set_latch_next(idx, tr(l.next));
        }
        for (l, name) in &self.outputs {
            out.add_output(name, tr(*l));
        }
        out
    }
}

pub fn lit_value(val: &[bool], l: Lit) -> bool {
    val[l.node()] != l.is_negated()
}

/// Compiles BDDs into the graph, one multiplexer per BDD node.
pub struct BddToAig<'a> {
    mgr: &'a BddManager,
    var_lit: &'a dyn Fn(VarId) -> Lit,
    memo: HashMap<u32, Lit>,
}

impl<'a> BddToAig<'a> {
    pub fn new(mgr: &'a BddManager, var_lit: &'a dyn Fn(VarId) -> Lit) -> Self {
        BddToAig {
            mgr,
            var_lit,
            memo: HashMap::new(),
        }
    }

    pub fn compile(&mut self, aig: &mut Aig, f: Bdd) -> Lit {
        if self.mgr.is_true(f) {
            return Lit::TRUE;
        }
        if self.mgr.is_false(f) {
            return Lit::FALSE;
        }
        if let Some(&l) = self.memo.get(&f.node_id()) {
            return l;
        }
        // explicit stack: deep BDDs would overflow recursion
        let mut stack = vec![(f, false)];
        while let Some((g, expanded)) = stack.pop() {
            if self.mgr.is_const(g) || self.memo.contains_key(&g.node_id()) {
                continue;
            }
            let (lo, hi) = self.mgr.children(g).expect("decision node");
            if !expanded {
                stack.push((g, true));
                stack.push((lo, false));
                stack.push((hi, false));
                continue;
            }
            let v = self.mgr.top_var(g).expect("decision node");
            let sel = (self.var_lit)(v);
            let h = self.lit_of(hi);
            let l = self.lit_of(lo);
            let m = aig.mux(sel, h, l);
            self.memo.insert(g.node_id(), m);
        }
        self.memo[&f.node_id()]
    }

    /// Continues from gates compiled earlier into the same graph.
    pub fn with_memo(mgr: &'a BddManager, var_lit: &'a dyn Fn(VarId) -> Lit, memo: HashMap<u32, Lit>) -> Self {
        BddToAig { mgr, var_lit, memo }
    }

    pub fn into_memo(self) -> HashMap<u32, Lit> {
        self.memo
    }

    fn lit_of(&self, f: Bdd) -> Lit {
        if self.mgr.is_true(f) {
            Lit::TRUE
        } else if self.mgr.is_false(f) {
            Lit::FALSE
        } else {
            self.memo[&f.node_id()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_hashing_and_constants() {
        let mut g = Aig::new();
        let a = g.add_input("a");
        let b = g.add_input("b");
        let x = g.and(a, b);
        assert_eq!(g.and(b, a), x);
        assert_eq!(g.and(a, !a), Lit::FALSE);
        assert_eq!(g.and(a, Lit::TRUE), a);
        assert_eq!(g.num_ands(), 1);
    }

    #[test]
    fn latch_toggles() {
        let mut g = Aig::new();
        let (idx, q) = g.add_latch("q", true);
        g.set_latch_next(idx, !q);
        g.add_output("q", q);
        let mut s = g.reset_state();
        let mut seen = Vec::new();
        for _ in 0..3 {
            let (o, n) = g.step(&[], &s);
            seen.push(o[0]);
            s = n;
        }
        assert_eq!(seen, vec![true, false, true]);
    }

    #[test]
    fn bdd_compilation_matches_eval() {
        let mut m = BddManager::new();
        let vs: Vec<VarId> = (0..3).map(|i| m.new_var(&alloc::format!("x{i}")).unwrap()).collect();
        let f = m.from_truth_table(&vs, |k| (0b1011_0110u64 >> k) & 1 == 1);
        let mut g = Aig::new();
        let ins: Vec<Lit> = (0..3).map(|i| g.add_input(&alloc::format!("x{i}"))).collect();
        let map = |v: VarId| ins[v.index()];
        let mut c = BddToAig::new(&m, &map);
        let l = c.compile(&mut g, f);
        g.add_output("f", l);
        for k in 0..8u64 {
            let a: Vec<bool> = (0..3).map(|b| k >> b & 1 == 1).collect();
            assert_eq!(g.step(&a, &[]).0[0], m.eval(f, &a));
        }
    }

    #[test]
    fn import_substitutes_inputs() {
        let mut inner = Aig::new();
        let a = inner.add_input("a");
        let (idx, q) = inner.add_latch("q", false);
        inner.set_latch_next(idx, a);
        let o = inner.and(a, q);
        inner.add_output("o", o);
        let mut outer = Aig::new();
        let x = outer.add_input("x");
        let outs = outer.import(&inner, &[!x]);
        outer.add_output("o", outs[0]);
        assert_eq!(outer.latches().len(), 1);
        let (o1, s1) = outer.step(&[false], &outer.reset_state());
        assert_eq!(o1, vec![false]);
        let (o2, _) = outer.step(&[false], &s1);
        assert_eq!(o2, vec![true]);
        let c = outer.compact();
        assert_eq!(c.step(&[false], &s1).0, vec![true]);
    }
}
