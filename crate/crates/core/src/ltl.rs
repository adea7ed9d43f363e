//! LTL formulas over a declared input/output partition.
//!
//! Formulas are hash-consed inside their [`Spec`], so structurally equal
//! subformulas share one id and `size` counts distinct subformulas.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormulaId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// Index into inputs followed by outputs.
    Atom(u32),
    Not(FormulaId),
    And(FormulaId, FormulaId),
    Or(FormulaId, FormulaId),
    Implies(FormulaId, FormulaId),
    Iff(FormulaId, FormulaId),
    Next(FormulaId),
    Until(FormulaId, FormulaId),
    Release(FormulaId, FormulaId),
    Finally(FormulaId),
    Globally(FormulaId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("`{0}` is declared both as input and as output")]
    Overlap(String),
    #[error("`{0}` is declared twice")]
    Duplicate(String),
    #[error("undeclared atom `{0}`")]
    Undeclared(String),
    #[error("midbit size {0} is outside 1..=12")]
    OutOfRange(usize),
}

/// A reactive synthesis problem: a formula plus the I/O partition of its atoms.
#[derive(Debug, Clone)]
pub struct Spec {
    inputs: Vec<String>,
    outputs: Vec<String>,
    nodes: Vec<Formula>,
    index: HashMap<Formula, FormulaId>,
    root: FormulaId,
}

impl Spec {
    pub fn new(inputs: &[String], outputs: &[String]) -> Result<Spec, SpecError> {
        let mut seen = HashSet::new();
        for n in inputs {
            if !seen.insert(n.as_str()) {
                return Err(SpecError::Duplicate(n.clone()));
            }
        }
        let ins: HashSet<&str> = seen.clone();
        for n in outputs {
            if ins.contains(n.as_str()) {
                return Err(SpecError::Overlap(n.clone()));
            }
            if !seen.insert(n.as_str()) {
                return Err(SpecError::Duplicate(n.clone()));
            }
        }
        let mut s = Spec {
            inputs: inputs.to_vec(),
            outputs: outputs.to_vec(),
            nodes: Vec::new(),
            index: HashMap::new(),
            root: FormulaId(0),
        };
        s.root = s.mk(Formula::True);
        Ok(s)
    }

    pub fn with_names(inputs: &[&str], outputs: &[&str]) -> Result<Spec, SpecError> {
        let i: Vec<String> = inputs.iter().map(|s| s.to_string()).collect();
        let o: Vec<String> = outputs.iter().map(|s| s.to_string()).collect();
        Spec::new(&i, &o)
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn atom_name(&self, atom: u32) -> &str {
        let a = atom as usize;
        if a < self.inputs.len() {
            &self.inputs[a]
        } else {
            &self.outputs[a - self.inputs.len()]
        }
    }

    pub fn atom_index(&self, name: &str) -> Option<u32> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .position(|n| n == name)
            .map(|p| p as u32)
    }

    pub fn formula(&self) -> FormulaId {
        self.root
    }

    pub fn set_formula(&mut self, f: FormulaId) {
        self.root = f;
    }

    pub fn node(&self, f: FormulaId) -> Formula {
        self.nodes[f.0 as usize]
    }

    pub fn mk(&mut self, node: Formula) -> FormulaId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = FormulaId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    pub fn tt(&mut self) -> FormulaId {
        self.mk(Formula::True)
    }

    pub fn ff(&mut self) -> FormulaId {
        self.mk(Formula::False)
    }

    pub fn atom(&mut self, name: &str) -> Result<FormulaId, SpecError> {
        let a = self
            .atom_index(name)
            .ok_or_else(|| SpecError::Undeclared(name.into()))?;
        Ok(self.mk(Formula::Atom(a)))
    }

    pub fn not(&mut self, a: FormulaId) -> FormulaId {
        self.mk(Formula::Not(a))
    }

    pub fn and(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.mk(Formula::And(a, b))
    }

    pub fn or(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.mk(Formula::Or(a, b))
    }

    pub fn implies(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.mk(Formula::Implies(a, b))
    }

    pub fn iff(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.mk(Formula::Iff(a, b))
    }

    pub fn next(&mut self, a: FormulaId) -> FormulaId {
        self.mk(Formula::Next(a))
    }

    pub fn until(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.mk(Formula::Until(a, b))
    }

    pub fn release(&mut self, a: FormulaId, b: FormulaId) -> FormulaId {
        self.mk(Formula::Release(a, b))
    }

    pub fn finally(&mut self, a: FormulaId) -> FormulaId {
        self.mk(Formula::Finally(a))
    }

    pub fn globally(&mut self, a: FormulaId) -> FormulaId {
        self.mk(Formula::Globally(a))
    }

    /// Conjunction of all items, `true` when empty.
    pub fn and_all(&mut self, items: impl IntoIterator<Item = FormulaId>) -> FormulaId {
        let mut it = items.into_iter();
        let Some(mut acc) = it.next() else {
            return self.tt();
        };
        for f in it {
            acc = self.and(acc, f);
        }
        acc
    }

    /// Number of distinct subformulas of the root.
    pub fn size(&self) -> usize {
        self.subformulas(self.root).len()
    }

    /// Distinct subformulas of `f`, children before parents.
    pub fn subformulas(&self, f: FormulaId) -> Vec<FormulaId> {
        let mut order = Vec::new();
        let mut seen = HashSet::new();
        let mut stack = vec![(f, false)];
        while let Some((g, done)) = stack.pop() {
            if done {
                order.push(g);
                continue;
            }
            if !seen.insert(g) {
                continue;
            }
            stack.push((g, true));
            for c in self.children(g).into_iter().rev() {
                if !seen.contains(&c) {
                    stack.push((c, false));
                }
            }
        }
        order
    }

    pub fn children(&self, f: FormulaId) -> Vec<FormulaId> {
        use Formula::*;
        match self.node(f) {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | Finally(a) | Globally(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Release(a, b) => {
                vec![a, b]
            }
        }
    }

    /// True when `f` contains no temporal operator.
    pub fn is_propositional(&self, f: FormulaId) -> bool {
        use Formula::*;
        self.subformulas(f)
            .into_iter()
            .all(|g| !matches!(self.node(g), Next(_) | Until(..) | Release(..) | Finally(_) | Globally(_)))
    }

    /// Copy of this spec whose formula is `!φ`.
    pub fn negate(&self) -> Spec {
        let mut s = self.clone();
        s.root = s.not(self.root);
        s
    }

    /// Renders a subformula with minimal parentheses.
    pub fn display(&self, f: FormulaId) -> DisplayFormula<'_> {
        DisplayFormula { spec: self, f }
    }
}

pub struct DisplayFormula<'a> {
    spec: &'a Spec,
    f: FormulaId,
}

fn prec(node: Formula) -> u8 {
    use Formula::*;
    match node {
        Iff(..) => 1,
        Implies(..) => 2,
        Or(..) => 3,
        And(..) => 4,
        Until(..) | Release(..) => 5,
        Not(_) | Next(_) | Finally(_) | Globally(_) => 6,
        True | False | Atom(_) => 7,
    }
}

impl DisplayFormula<'_> {
    fn write(&self, out: &mut fmt::Formatter<'_>, f: FormulaId, min: u8) -> fmt::Result {
        use Formula::*;
        let node = self.spec.node(f);
        let p = prec(node);
        let paren = p < min;
        if paren {
            out.write_str("(")?;
        }
        let bin = |out: &mut fmt::Formatter<'_>, a, b, op: &str, left_assoc: bool| {
            let (lm, rm) = if left_assoc { (p, p + 1) } else { (p + 1, p) };
            self.write(out, a, lm)?;
            write!(out, " {op} ")?;
            self.write(out, b, rm)
        };
        match node {
            True => out.write_str("true")?,
            False => out.write_str("false")?,
            Atom(a) => out.write_str(self.spec.atom_name(a))?,
            Not(a) => {
                out.write_str("!")?;
                self.write(out, a, 6)?;
            }
            Next(a) | Finally(a) | Globally(a) => {
                let op = match node {
                    Next(_) => "X",
                    Finally(_) => "F",
                    _ => "G",
                };
                write!(out, "{op} ")?;
                self.write(out, a, 6)?;
            }
            And(a, b) => bin(out, a, b, "&", true)?,
            Or(a, b) => bin(out, a, b, "|", true)?,
            Implies(a, b) => bin(out, a, b, "->", false)?,
            Iff(a, b) => bin(out, a, b, "<->", false)?,
            Until(a, b) => bin(out, a, b, "U", false)?,
            Release(a, b) => bin(out, a, b, "R", false)?,
        }
        if paren {
            out.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for DisplayFormula<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.f, 0)
    }
}

/// `G (o_{n+1} <-> bit n-1 of i*o)` with `i = i_1..i_n`, `o = o_1..o_n`, least
/// significant bit first.
pub fn gen_midbit_spec(n: usize) -> Result<Spec, SpecError> {
    if !(1..=12).contains(&n) {
        return Err(SpecError::OutOfRange(n));
    }
    let inputs: Vec<String> = (1..=n).map(|k| format!("i_{k}")).collect();
    let outputs: Vec<String> = (1..=n + 1).map(|k| format!("o_{k}")).collect();
    let mut s = Spec::new(&inputs, &outputs)?;
    let i: Vec<FormulaId> = (0..n).map(|k| s.mk(Formula::Atom(k as u32))).collect();
    let o: Vec<FormulaId> = (0..=n).map(|k| s.mk(Formula::Atom((n + k) as u32))).collect();

    let xor = |s: &mut Spec, a, b| {
        let nb = s.not(b);
        s.iff(a, nb)
    };
    let maj = |s: &mut Spec, a, b, c| {
        let ab = s.and(a, b);
        let aob = s.or(a, b);
        let c_ab = s.and(c, aob);
        s.or(ab, c_ab)
    };

    // acc[k] is bit k of the running sum, truncated to n bits
    let mut acc: Vec<FormulaId> = (0..n).map(|k| s.and(i[k], o[0])).collect();
    for j in 1..n {
        let mut carry: Option<FormulaId> = None;
        for col in j..n {
            let pp = s.and(i[col - j], o[j]);
            let (sum, c) = match carry {
                None => {
                    let sum = xor(&mut s, acc[col], pp);
                    (sum, s.and(acc[col], pp))
                }
                Some(c) => {
                    let t = xor(&mut s, acc[col], pp);
                    let sum = xor(&mut s, t, c);
                    (sum, maj(&mut s, acc[col], pp, c))
                }
            };
            acc[col] = sum;
            carry = Some(c);
        }
    }
    let body = s.iff(o[n], acc[n - 1]);
    let root = s.globally(body);
    s.set_formula(root);
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_consing_shares_subformulas() {
        let mut s = Spec::with_names(&["i"], &["o"]).unwrap();
        let i = s.atom("i").unwrap();
        let o = s.atom("o").unwrap();
        let a = s.iff(o, i);
        let b = s.iff(o, i);
        assert_eq!(a, b);
        let g = s.globally(a);
        s.set_formula(g);
        assert_eq!(s.size(), 4);
    }

    #[test]
    fn rejects_bad_partitions() {
        assert_eq!(
            Spec::with_names(&["a"], &["a"]).unwrap_err(),
            SpecError::Overlap("a".into())
        );
        let mut s = Spec::with_names(&["a"], &[]).unwrap();
        assert_eq!(s.atom("z"), Err(SpecError::Undeclared("z".into())));
    }

    #[test]
    fn printer_uses_minimal_parentheses() {
        let mut s = Spec::with_names(&["a", "b"], &["c"]).unwrap();
        let a = s.atom("a").unwrap();
        let b = s.atom("b").unwrap();
        let c = s.atom("c").unwrap();
        let ab = s.and(a, b);
        let f = s.or(ab, c);
        assert_eq!(s.display(f).to_string(), "a & b | c");
        let bc = s.or(b, c);
        let g = s.and(a, bc);
        assert_eq!(s.display(g).to_string(), "a & (b | c)");
        let u = s.until(a, b);
        let uu = s.until(u, c);
        assert_eq!(s.display(uu).to_string(), "(a U b) U c");
        let gi = s.iff(c, a);
        let gg = s.globally(gi);
        let n = s.not(gg);
        assert_eq!(s.display(n).to_string(), "!G (c <-> a)");
    }

    #[test]
    fn midbit_one_is_the_conjunction() {
        let s = gen_midbit_spec(1).unwrap();
        assert_eq!(s.display(s.formula()).to_string(), "G (o_2 <-> i_1 & o_1)");
        assert!(gen_midbit_spec(0).is_err());
        assert!(gen_midbit_spec(13).is_err());
    }

    #[test]
    fn negate_wraps_root() {
        let mut s = Spec::with_names(&["a"], &[]).unwrap();
        let a = s.atom("a").unwrap();
        let g = s.globally(a);
        s.set_formula(g);
        let n = s.negate();
        assert_eq!(n.node(n.formula()), Formula::Not(g));
        assert_eq!(s.formula(), g);
    }
}
