//! Reduced ordered binary decision diagrams.
//!
//! A [`BddManager`] owns a unique table of nodes and hands out [`Bdd`] handles.
//! Handles are plain indices tagged with the id of the manager that created them,
//! so two handles compare equal exactly when they denote the same Boolean function
//! of the same manager. Variables are ordered by creation; there is no reordering.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;
use core::sync::atomic::{AtomicU32, Ordering};

use hashbrown::HashMap;
use thiserror::Error;

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(1);

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL_VAR: u32 = u32::MAX;

/// Position of a variable in the global order of one manager.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Handle to a canonical node of a [`BddManager`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bdd {
    manager: u32,
    node: u32,
}

impl Bdd {
    /// Raw node index inside the owning manager. Stable for the manager's lifetime.
    pub fn node_id(self) -> u32 {
        self.node
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoolOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BddError {
    #[error("variable name `{0}` is already declared")]
    DuplicateName(String),
    #[error("unknown variable #{0}")]
    UnknownVar(u32),
    #[error("BDD handle belongs to a different manager")]
    ManagerMismatch,
    #[error("variable renaming is not injective")]
    NonInjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    low: u32,
    high: u32,
}

pub struct BddManager {
    id: u32,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    apply_cache: HashMap<(BoolOp, u32, u32), u32>,
    not_cache: HashMap<u32, u32>,
    /// Quantified variable sets as `(mask, last variable)`, interned by sorted ids.
    quant_sets: Vec<(Vec<bool>, u32)>,
    quant_ids: HashMap<Vec<u32>, u32>,
    quant_cache: HashMap<(u32, u32, BoolOp), u32>,
    restrict_cache: HashMap<(u32, u32, bool), u32>,
    names: Vec<String>,
    by_name: HashMap<String, VarId>,
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new()
    }
}

impl core::fmt::Debug for BddManager {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("BddManager")
            .field("id", &self.id)
            .field("vars", &self.names.len())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl BddManager {
    pub fn new() -> Self {
        let terminal = |v| Node {
            var: TERMINAL_VAR,
            low: v,
            high: v,
        };
        BddManager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            nodes: vec![terminal(FALSE), terminal(TRUE)],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            not_cache: HashMap::new(),
            quant_sets: Vec::new(),
            quant_ids: HashMap::new(),
            quant_cache: HashMap::new(),
            restrict_cache: HashMap::new(),
            names: Vec::new(),
            by_name: HashMap::new(),
        }
    }

    /// Appends a fresh variable at the end of the order.
    pub fn new_var(&mut self, name: &str) -> Result<VarId, BddError> {
        if self.by_name.contains_key(name) {
            return Err(BddError::DuplicateName(name.into()));
        }
        let v = VarId(self.names.len() as u32);
        self.names.push(name.into());
        self.by_name.insert(name.into(), v);
        Ok(v)
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.names[v.index()]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    /// Number of nodes in the unique table, terminals included.
    pub fn table_size(&self) -> usize {
        self.nodes.len()
    }

    /// Drops the operation caches. Nodes stay valid.
    pub fn clear_caches(&mut self) {
        self.apply_cache.clear();
        self.not_cache.clear();
        self.quant_cache.clear();
        self.restrict_cache.clear();
    }

    fn wrap(&self, node: u32) -> Bdd {
        Bdd {
            manager: self.id,
            node,
        }
    }

    fn check(&self, a: Bdd) -> Result<u32, BddError> {
        if a.manager == self.id {
            Ok(a.node)
        } else {
            Err(BddError::ManagerMismatch)
        }
    }

    fn own(&self, a: Bdd) -> u32 {
        assert!(
            a.manager == self.id,
            "BDD handle used with a manager that did not create it"
        );
        a.node
    }

    fn check_var(&self, v: VarId) -> Result<(), BddError> {
        if v.index() < self.names.len() {
            Ok(())
        } else {
            Err(BddError::UnknownVar(v.0))
        }
    }

    pub fn constant(&self, value: bool) -> Bdd {
        self.wrap(if value { TRUE } else { FALSE })
    }

    pub fn tt(&self) -> Bdd {
        self.wrap(TRUE)
    }

    pub fn ff(&self) -> Bdd {
        self.wrap(FALSE)
    }

    /// The projection function of `v`.
    ///
    /// Panics if `v` was not created by this manager.
    pub fn var(&mut self, v: VarId) -> Bdd {
        self.check_var(v).expect("unknown variable");
        let n = self.mk(v.0, FALSE, TRUE);
        self.wrap(n)
    }

    pub fn literal(&mut self, v: VarId, positive: bool) -> Bdd {
        self.check_var(v).expect("unknown variable");
        let n = if positive {
            self.mk(v.0, FALSE, TRUE)
        } else {
            self.mk(v.0, TRUE, FALSE)
        };
        self.wrap(n)
    }

    /// Conjunction of literals.
    pub fn cube(&mut self, lits: &[(VarId, bool)]) -> Bdd {
        let mut acc = self.tt();
        for &(v, pos) in lits {
            let l = self.literal(v, pos);
            acc = self.and(acc, l);
        }
        acc
    }

    fn mk(&mut self, var: u32, low: u32, high: u32) -> u32 {
        if low == high {
            return low;
        }
        let node = Node { var, low, high };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    #[inline]
    fn node(&self, n: u32) -> Node {
        self.nodes[n as usize]
    }

    pub fn is_true(&self, a: Bdd) -> bool {
        self.own(a) == TRUE
    }

    pub fn is_false(&self, a: Bdd) -> bool {
        self.own(a) == FALSE
    }

    pub fn is_sat(&self, a: Bdd) -> bool {
        self.own(a) != FALSE
    }

    pub fn is_const(&self, a: Bdd) -> bool {
        self.own(a) <= TRUE
    }

    /// Top variable of a non-terminal node.
    pub fn top_var(&self, a: Bdd) -> Option<VarId> {
        let n = self.node(self.own(a));
        (n.var != TERMINAL_VAR).then_some(VarId(n.var))
    }

    /// `(low, high)` children of a non-terminal node.
    pub fn children(&self, a: Bdd) -> Option<(Bdd, Bdd)> {
        let n = self.node(self.own(a));
        (n.var != TERMINAL_VAR).then(|| (self.wrap(n.low), self.wrap(n.high)))
    }

    pub fn apply(&mut self, op: BoolOp, a: Bdd, b: Bdd) -> Result<Bdd, BddError> {
        let (x, y) = (self.check(a)?, self.check(b)?);
        let r = self.apply_rec(op, x, y);
        Ok(self.wrap(r))
    }

    fn apply_terminal(op: BoolOp, a: u32, b: u32) -> Option<u32> {
        match op {
            BoolOp::And => match (a, b) {
                (FALSE, _) | (_, FALSE) => Some(FALSE),
                (TRUE, x) | (x, TRUE) => Some(x),
                _ if a == b => Some(a),
                _ => None,
            },
            BoolOp::Or => match (a, b) {
                (TRUE, _) | (_, TRUE) => Some(TRUE),
                (FALSE, x) | (x, FALSE) => Some(x),
                _ if a == b => Some(a),
                _ => None,
            },
            BoolOp::Xor => match (a, b) {
                _ if a == b => Some(FALSE),
                (FALSE, x) | (x, FALSE) => Some(x),
                _ => None,
            },
            BoolOp::Iff => match (a, b) {
                _ if a == b => Some(TRUE),
                (TRUE, x) | (x, TRUE) => Some(x),
                _ => None,
            },
            BoolOp::Implies => match (a, b) {
                (FALSE, _) | (_, TRUE) => Some(TRUE),
                (TRUE, x) => Some(x),
                _ if a == b => Some(TRUE),
                _ => None,
            },
        }
    }

    fn apply_rec(&mut self, op: BoolOp, a: u32, b: u32) -> u32 {
        if let Some(r) = Self::apply_terminal(op, a, b) {
            return r;
        }
        if a <= TRUE && b <= TRUE {
            let (x, y) = (a == TRUE, b == TRUE);
            let v = match op {
                BoolOp::And => x && y,
                BoolOp::Or => x || y,
                BoolOp::Xor => x != y,
                BoolOp::Iff => x == y,
                BoolOp::Implies => !x || y,
            };
            return if v { TRUE } else { FALSE };
        }
        let key = match op {
            BoolOp::Implies => (op, a, b),
            _ => (op, a.min(b), a.max(b)),
        };
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let (na, nb) = (self.node(a), self.node(b));
        let var = na.var.min(nb.var);
        let (a0, a1) = if na.var == var { (na.low, na.high) } else { (a, a) };
        let (b0, b1) = if nb.var == var { (nb.low, nb.high) } else { (b, b) };
        let low = self.apply_rec(op, a0, b0);
        let high = self.apply_rec(op, a1, b1);
        let r = self.mk(var, low, high);
        self.apply_cache.insert(key, r);
        r
    }

    pub fn and(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BoolOp::And, a, b).expect("manager mismatch")
    }

    pub fn or(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BoolOp::Or, a, b).expect("manager mismatch")
    }

    pub fn xor(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BoolOp::Xor, a, b).expect("manager mismatch")
    }

    pub fn iff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BoolOp::Iff, a, b).expect("manager mismatch")
    }

    pub fn implies(&mut self, a: Bdd, b: Bdd) -> Bdd {
        self.apply(BoolOp::Implies, a, b).expect("manager mismatch")
    }

    pub fn and_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> Bdd {
        let mut acc = self.tt();
        for b in items {
            acc = self.and(acc, b);
            if self.is_false(acc) {
                break;
            }
        }
        acc
    }

    pub fn or_all(&mut self, items: impl IntoIterator<Item = Bdd>) -> Bdd {
        let mut acc = self.ff();
        for b in items {
            acc = self.or(acc, b);
            if self.is_true(acc) {
                break;
            }
        }
        acc
    }

    pub fn not(&mut self, a: Bdd) -> Bdd {
        let n = self.own(a);
        let r = self.not_rec(n);
        self.wrap(r)
    }

    fn not_rec(&mut self, a: u32) -> u32 {
        match a {
            FALSE => return TRUE,
            TRUE => return FALSE,
            _ => {}
        }
        if let Some(&r) = self.not_cache.get(&a) {
            return r;
        }
        let n = self.node(a);
        let low = self.not_rec(n.low);
        let high = self.not_rec(n.high);
        let r = self.mk(n.var, low, high);
        self.not_cache.insert(a, r);
        self.not_cache.insert(r, a);
        r
    }

    pub fn ite(&mut self, cond: Bdd, then: Bdd, otherwise: Bdd) -> Bdd {
        let t = self.and(cond, then);
        let nc = self.not(cond);
        let e = self.and(nc, otherwise);
        self.or(t, e)
    }

    /// Cofactor of `a` with `v` fixed to `value`.
    pub fn restrict(&mut self, a: Bdd, v: VarId, value: bool) -> Result<Bdd, BddError> {
        let n = self.check(a)?;
        self.check_var(v)?;
        let r = self.restrict_rec(n, v.0, value);
        Ok(self.wrap(r))
    }

    fn restrict_rec(&mut self, a: u32, v: u32, value: bool) -> u32 {
        let n = self.node(a);
        if n.var == TERMINAL_VAR || n.var > v {
            return a;
        }
        if n.var == v {
            return if value { n.high } else { n.low };
        }
        if let Some(&r) = self.restrict_cache.get(&(a, v, value)) {
            return r;
        }
        let low = self.restrict_rec(n.low, v, value);
        let high = self.restrict_rec(n.high, v, value);
        let r = self.mk(n.var, low, high);
        self.restrict_cache.insert((a, v, value), r);
        r
    }

    /// Existential quantification of `vars`.
    pub fn exists(&mut self, a: Bdd, vars: &[VarId]) -> Bdd {
        self.quantify(a, vars, BoolOp::Or)
    }

    /// Universal quantification of `vars`.
    pub fn forall(&mut self, a: Bdd, vars: &[VarId]) -> Bdd {
        self.quantify(a, vars, BoolOp::And)
    }

    fn quantify(&mut self, a: Bdd, vars: &[VarId], op: BoolOp) -> Bdd {
        let n = self.own(a);
        if vars.is_empty() {
            return a;
        }
        let mut key: Vec<u32> = vars.iter().map(|v| v.0).collect();
        key.sort_unstable();
        key.dedup();
        let set = match self.quant_ids.get(&key) {
            Some(&id) => id,
            None => {
                let mut mask = vec![false; self.names.len()];
                for &v in &key {
                    self.check_var(VarId(v)).expect("unknown variable");
                    mask[v as usize] = true;
                }
                let id = self.quant_sets.len() as u32;
                self.quant_sets.push((mask, *key.last().expect("non-empty")));
                self.quant_ids.insert(key, id);
                id
            }
        };
        if let Some(&r) = self.quant_cache.get(&(n, set, op)) {
            return self.wrap(r);
        }
        let (mask, last) = core::mem::take(&mut self.quant_sets[set as usize]);
        let r = self.quantify_rec(n, &mask, last, set, op);
        self.quant_sets[set as usize] = (mask, last);
        self.wrap(r)
    }

    fn quantify_rec(&mut self, a: u32, mask: &[bool], last: u32, set: u32, op: BoolOp) -> u32 {
        let n = self.node(a);
        if n.var == TERMINAL_VAR || n.var > last {
            return a;
        }
        if let Some(&r) = self.quant_cache.get(&(a, set, op)) {
            return r;
        }
        let low = self.quantify_rec(n.low, mask, last, set, op);
        let high = self.quantify_rec(n.high, mask, last, set, op);
        let r = if mask[n.var as usize] {
            self.apply_rec(op, low, high)
        } else {
            self.mk(n.var, low, high)
        };
        self.quant_cache.insert((a, set, op), r);
        r
    }

    /// Simultaneous variable substitution `v ↦ map(v)`.
    pub fn rename(&mut self, a: Bdd, map: &[(VarId, VarId)]) -> Result<Bdd, BddError> {
        let n = self.check(a)?;
        let mut image = vec![None; self.names.len()];
        let mut used = vec![false; self.names.len()];
        for &(from, to) in map {
            self.check_var(from)?;
            self.check_var(to)?;
            if image[from.index()].is_some() || used[to.index()] {
                return Err(BddError::NonInjective);
            }
            image[from.index()] = Some(to.0);
            used[to.index()] = true;
        }
        let mut memo = HashMap::new();
        let r = self.rename_rec(n, &image, &mut memo);
        Ok(self.wrap(r))
    }

    fn rename_rec(&mut self, a: u32, image: &[Option<u32>], memo: &mut HashMap<u32, u32>) -> u32 {
        let n = self.node(a);
        if n.var == TERMINAL_VAR {
            return a;
        }
        if let Some(&r) = memo.get(&a) {
            return r;
        }
        let low = self.rename_rec(n.low, image, memo);
        let high = self.rename_rec(n.high, image, memo);
        let target = image[n.var as usize].unwrap_or(n.var);
        let r = self.mk_or_ite(target, high, low);
        memo.insert(a, r);
        r
    }

    /// `ite(var, high, low)`, taking the direct node when the order allows it.
    fn mk_or_ite(&mut self, var: u32, high: u32, low: u32) -> u32 {
        if self.node(low).var > var && self.node(high).var > var {
            self.mk(var, low, high)
        } else {
            self.ite_rec(var, high, low)
        }
    }

    /// `ite(var, high, low)` for arbitrary (not necessarily ordered) sub-BDDs.
    fn ite_rec(&mut self, var: u32, high: u32, low: u32) -> u32 {
        let x = self.mk(var, FALSE, TRUE);
        let nx = self.mk(var, TRUE, FALSE);
        let t = self.apply_rec(BoolOp::And, x, high);
        let e = self.apply_rec(BoolOp::And, nx, low);
        self.apply_rec(BoolOp::Or, t, e)
    }

    /// Functional composition `a[v ↦ f]`.
    pub fn substitute(&mut self, a: Bdd, v: VarId, f: Bdd) -> Result<Bdd, BddError> {
        let n = self.check(a)?;
        let g = self.check(f)?;
        self.check_var(v)?;
        let mut memo = HashMap::new();
        let r = self.compose_rec(n, v.0, g, &mut memo);
        Ok(self.wrap(r))
    }

    fn compose_rec(&mut self, a: u32, v: u32, f: u32, memo: &mut HashMap<u32, u32>) -> u32 {
        let n = self.node(a);
        if n.var == TERMINAL_VAR || n.var > v {
            return a;
        }
        if let Some(&r) = memo.get(&a) {
            return r;
        }
        let r = if n.var == v {
            let t = self.apply_rec(BoolOp::And, f, n.high);
            let nf = self.not_rec(f);
            let e = self.apply_rec(BoolOp::And, nf, n.low);
            self.apply_rec(BoolOp::Or, t, e)
        } else {
            let low = self.compose_rec(n.low, v, f, memo);
            let high = self.compose_rec(n.high, v, f, memo);
            self.mk_or_ite(n.var, high, low)
        };
        memo.insert(a, r);
        r
    }

    /// Simultaneous composition `a[v ↦ image[v]]` for every `v` with an image.
    fn compose_vec_rec(&mut self, a: u32, image: &[Option<u32>], last: u32, memo: &mut HashMap<u32, u32>) -> u32 {
        let n = self.node(a);
        if n.var == TERMINAL_VAR || n.var > last {
            return a;
        }
        if let Some(&r) = memo.get(&a) {
            return r;
        }
        let low = self.compose_vec_rec(n.low, image, last, memo);
        let high = self.compose_vec_rec(n.high, image, last, memo);
        let r = match image[n.var as usize] {
            Some(f) => {
                let t = self.apply_rec(BoolOp::And, f, high);
                let nf = self.not_rec(f);
                let e = self.apply_rec(BoolOp::And, nf, low);
                self.apply_rec(BoolOp::Or, t, e)
            }
            None => self.mk_or_ite(n.var, high, low),
        };
        memo.insert(a, r);
        r
    }

    /// Nodes reachable from `a`, terminals included (`True` alone counts 1).
    pub fn node_count(&self, a: Bdd) -> usize {
        let mut seen = hashbrown::HashSet::new();
        let mut stack = vec![self.own(a)];
        while let Some(n) = stack.pop() {
            if !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            if node.var != TERMINAL_VAR {
                stack.push(node.low);
                stack.push(node.high);
            }
        }
        seen.len()
    }

    /// Decision nodes reachable from `a`.
    pub fn internal_node_count(&self, a: Bdd) -> usize {
        self.shared_internal_count(core::iter::once(a))
    }

    /// Decision nodes reachable from any of `roots`, shared nodes counted once.
    pub fn shared_internal_count(&self, roots: impl IntoIterator<Item = Bdd>) -> usize {
        let mut seen = hashbrown::HashSet::new();
        let mut stack: Vec<u32> = roots.into_iter().map(|r| self.own(r)).collect();
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            stack.push(node.low);
            stack.push(node.high);
        }
        seen.len()
    }

    /// Variables `a` depends on, in order.
    pub fn support(&self, a: Bdd) -> Vec<VarId> {
        let mut vars = vec![false; self.names.len()];
        let mut seen = hashbrown::HashSet::new();
        let mut stack = vec![self.own(a)];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            vars[node.var as usize] = true;
            stack.push(node.low);
            stack.push(node.high);
        }
        vars.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| VarId(i as u32))
            .collect()
    }

    /// Evaluates `a` under a full assignment indexed by variable.
    pub fn eval(&self, a: Bdd, assignment: &[bool]) -> bool {
        let mut n = self.own(a);
        loop {
            let node = self.node(n);
            if node.var == TERMINAL_VAR {
                return n == TRUE;
            }
            n = if assignment[node.var as usize] {
                node.high
            } else {
                node.low
            };
        }
    }

    pub fn eval_with(&self, a: Bdd, value: impl Fn(VarId) -> bool) -> bool {
        let mut n = self.own(a);
        loop {
            let node = self.node(n);
            if node.var == TERMINAL_VAR {
                return n == TRUE;
            }
            n = if value(VarId(node.var)) {
                node.high
            } else {
                node.low
            };
        }
    }

    /// Builds the function over `vars` whose value on the assignment with bit `i`
    /// of the index equal to the value of `vars[i]` is `table(index)`.
    pub fn from_truth_table(&mut self, vars: &[VarId], table: impl Fn(u64) -> bool) -> Bdd {
        let mut order: Vec<(VarId, usize)> = vars.iter().copied().zip(0..).collect();
        order.sort();
        for w in order.windows(2) {
            assert!(w[0].0 != w[1].0, "duplicate variable in truth table");
        }
        for (v, _) in &order {
            self.check_var(*v).expect("unknown variable");
        }
        let r = self.table_rec(&order, 0, 0, &table);
        self.wrap(r)
    }

    fn table_rec(
        &mut self,
        order: &[(VarId, usize)],
        depth: usize,
        bits: u64,
        table: &impl Fn(u64) -> bool,
    ) -> u32 {
        if depth == order.len() {
            return if table(bits) { TRUE } else { FALSE };
        }
        let (v, pos) = order[depth];
        let low = self.table_rec(order, depth + 1, bits, table);
        let high = self.table_rec(order, depth + 1, bits | (1 << pos), table);
        self.mk(v.0, low, high)
    }

    /// Disjoint cubes covering `a`, one per path to `True`.
    pub fn cubes(&self, a: Bdd) -> Vec<Vec<(VarId, bool)>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.cubes_rec(self.own(a), &mut path, &mut out);
        out
    }

    fn cubes_rec(&self, n: u32, path: &mut Vec<(VarId, bool)>, out: &mut Vec<Vec<(VarId, bool)>>) {
        match n {
            FALSE => {}
            TRUE => out.push(path.clone()),
            _ => {
                let node = self.node(n);
                path.push((VarId(node.var), false));
                self.cubes_rec(node.low, path, out);
                path.pop();
                path.push((VarId(node.var), true));
                self.cubes_rec(node.high, path, out);
                path.pop();
            }
        }
    }

    /// Skolem functions for `xs` in `b`.
    ///
    /// Returns `F` with support disjoint from `xs` such that
    /// `¬(∃xs. b) ∨ b[xs ↦ F]` is valid. Quantifies `xs` from the back, then picks
    /// each `F_i` as the positive cofactor of `∃x_{i+1..}. b` with the earlier
    /// functions substituted in.
    pub fn skolem(&mut self, b: Bdd, xs: &[VarId]) -> Vec<Bdd> {
        let mut prefixes = Vec::with_capacity(xs.len());
        let mut cur = b;
        for &x in xs.iter().rev() {
            prefixes.push(cur);
            cur = self.exists(cur, &[x]);
        }
        prefixes.reverse();
        let mut fs: Vec<Bdd> = Vec::with_capacity(xs.len());
        let mut image: Vec<Option<u32>> = vec![None; self.names.len()];
        let mut last = 0;
        for (i, &x) in xs.iter().enumerate() {
            let g = self.restrict(prefixes[i], x, true).expect("known variable");
            // earlier functions are free of `xs`, so one simultaneous pass suffices
            let f = if i == 0 {
                g
            } else {
                let mut memo = HashMap::new();
                let r = self.compose_vec_rec(self.own(g), &image, last, &mut memo);
                self.wrap(r)
            };
            image[x.index()] = Some(self.own(f));
            last = last.max(x.0);
            fs.push(f);
        }
        fs
    }

    /// Graphviz rendering, for debugging.
    pub fn to_dot(&self, a: Bdd) -> String {
        let mut s = String::from("digraph bdd {\n  n0 [shape=box,label=\"0\"];\n  n1 [shape=box,label=\"1\"];\n");
        let mut seen = hashbrown::HashSet::new();
        let mut stack = vec![self.own(a)];
        while let Some(n) = stack.pop() {
            if n <= TRUE || !seen.insert(n) {
                continue;
            }
            let node = self.node(n);
            let _ = writeln!(s, "  n{} [label=\"{}\"];", n, self.names[node.var as usize]);
            let _ = writeln!(s, "  n{} -> n{} [style=dashed];", n, node.low);
            let _ = writeln!(s, "  n{} -> n{};", n, node.high);
            stack.push(node.low);
            stack.push(node.high);
        }
        s.push_str("}\n");
        s
    }

    /// Human-readable sum of cubes, using variable names.
    pub fn to_expr(&self, a: Bdd) -> String {
        if self.is_true(a) {
            return "true".into();
        }
        if self.is_false(a) {
            return "false".into();
        }
        let cubes = self.cubes(a);
        let terms: Vec<String> = cubes
            .iter()
            .map(|c| {
                if c.is_empty() {
                    return "true".into();
                }
                let lits: Vec<String> = c
                    .iter()
                    .map(|&(v, pos)| {
                        if pos {
                            self.names[v.index()].clone()
                        } else {
                            format!("!{}", self.names[v.index()])
                        }
                    })
                    .collect();
                lits.join(" & ")
            })
            .collect();
        terms.join(" | ")
    }
}
