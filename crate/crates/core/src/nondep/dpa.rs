//! Büchi to parity determinization with compact history trees.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::automata::{scc, Nba};

/// Deterministic parity automaton over letter indices. State 0 is initial.
/// Max-parity: a run is accepting when the largest priority seen infinitely often
/// is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dpa {
    pub trans: Vec<Vec<usize>>,
    pub priority: Vec<u32>,
}

impl Dpa {
    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_letters(&self) -> usize {
        self.trans.first().map_or(0, |t| t.len())
    }

    pub fn accepts_lasso(&self, stem: &[usize], cycle: &[usize]) -> bool {
        let mut s = 0;
        for &a in stem {
            s = self.trans[s][a];
        }
        // iterate whole cycles until the state at the cycle start repeats
        let mut starts: Vec<usize> = Vec::new();
        let mut maxes: Vec<u32> = Vec::new();
        loop {
            if let Some(k) = starts.iter().position(|&x| x == s) {
                let m = maxes[k..].iter().copied().max().expect("non-empty");
                return m % 2 == 0;
            }
            starts.push(s);
            let mut m = 0;
            for &a in cycle {
                s = self.trans[s][a];
                m = m.max(self.priority[s]);
            }
            maxes.push(m);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct TreeNode {
    name: u32,
    depth: u32,
    label: Vec<usize>,
}

/// Pre-order serialization; children ordered by name (= age).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Tree(Vec<TreeNode>);

struct Work {
    name: u32,
    label: Vec<usize>,
    children: Vec<usize>,
    green: bool,
}

fn union_succ(label: &[usize], succ: &[Vec<usize>]) -> Vec<usize> {
    let mut out: Vec<usize> = label.iter().flat_map(|&q| succ[q].iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_err()).collect()
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_ok()).collect()
}

/// One step of the construction. Returns the successor tree and the min-parity
/// priority of the transition (`neutral` when nothing happened).
fn step(tree: &Tree, succ: &[Vec<usize>], accepting: &[bool], neutral: u32) -> (Tree, u32) {
    if tree.0.is_empty() {
        return (Tree(Vec::new()), neutral);
    }
    // rebuild the working tree from the pre-order list
    let mut w: Vec<Work> = Vec::new();
    let mut path: Vec<usize> = Vec::new();
    for n in &tree.0 {
        path.truncate(n.depth as usize);
        let id = w.len();
        if let Some(&p) = path.last() {
            w[p].children.push(id);
        }
        w.push(Work {
            name: n.name,
            label: union_succ(&n.label, succ),
            children: Vec::new(),
            green: false,
        });
        path.push(id);
    }
    let mut fresh = tree.0.iter().map(|n| n.name).max().unwrap_or(0) + 1;
    let existing = w.len();
    for v in 0..existing {
        let f: Vec<usize> = w[v].label.iter().copied().filter(|&q| accepting[q]).collect();
        if !f.is_empty() {
            let id = w.len();
            w.push(Work {
                name: fresh,
                label: f,
                children: Vec::new(),
                green: false,
            });
            fresh += 1;
            w[v].children.push(id);
        }
    }
    // a state stays only in the oldest branch that holds it
    fn horizontal(w: &mut [Work], v: usize, allowed: &[usize]) {
        w[v].label = intersect(&w[v].label, allowed);
        let mut avail = w[v].label.clone();
        for c in w[v].children.clone() {
            horizontal(w, c, &avail);
            avail = minus(&avail, &w[c].label);
        }
    }
    let all = w[0].label.clone();
    horizontal(&mut w, 0, &all);

    let mut removed_min = u32::MAX;
    fn drop_subtree(w: &[Work], v: usize, min: &mut u32) {
        *min = (*min).min(w[v].name);
        for &c in &w[v].children {
            drop_subtree(w, c, min);
        }
    }
    fn prune(w: &mut Vec<Work>, v: usize, min: &mut u32) {
        let kids = core::mem::take(&mut w[v].children);
        let mut keep = Vec::new();
        for c in kids {
            if w[c].label.is_empty() {
                drop_subtree(w, c, min);
            } else {
                prune(w, c, min);
                keep.push(c);
            }
        }
        w[v].children = keep;
        let covered: usize = w[v].children.iter().map(|&c| w[c].label.len()).sum();
        if !w[v].children.is_empty() && covered == w[v].label.len() {
            for c in core::mem::take(&mut w[v].children) {
                drop_subtree(w, c, min);
            }
            w[v].green = true;
        }
    }
    if w[0].label.is_empty() {
        drop_subtree(&w, 0, &mut removed_min);
        return (Tree(Vec::new()), 2 * removed_min + 1);
    }
    prune(&mut w, 0, &mut removed_min);
    let mut out = Vec::new();
    let mut green_min = u32::MAX;
    let mut stack = vec![(0usize, 0u32)];
    while let Some((v, d)) = stack.pop() {
        if w[v].green {
            green_min = green_min.min(w[v].name);
        }
        out.push(TreeNode {
            name: w[v].name,
            depth: d,
            label: w[v].label.clone(),
        });
        let mut kids = w[v].children.clone();
        kids.sort_by_key(|&c| core::cmp::Reverse(w[c].name));
        for c in kids {
            stack.push((c, d + 1));
        }
    }
    let prio = if green_min < removed_min {
        2 * green_min
    } else if removed_min != u32::MAX {
        2 * removed_min + 1
    } else {
        neutral
    };
    let mut names: Vec<u32> = out.iter().map(|n| n.name).collect();
    names.sort_unstable();
    for n in &mut out {
        n.name = names.binary_search(&n.name).expect("present") as u32 + 1;
    }
    (Tree(out), prio)
}

/// Errors are reported as the exceeded cap.
pub fn determinize(
    nba: &Nba,
    succ: &[Vec<Vec<usize>>],
    state_cap: usize,
) -> Result<Dpa, usize> {
    let n = nba.num_states() as u32;
    let accepting: Vec<bool> = (0..nba.num_states()).map(|q| nba.is_accepting(q)).collect();
    // names stay below 2n + 1 within a step
    let neutral = 2 * (2 * n + 1) + 1;
    let flip = |p: u32| neutral + 1 - p;
    let init = Tree(vec![TreeNode {
        name: 1,
        depth: 0,
        label: vec![nba.initial()],
    }]);
    let mut ids: HashMap<(Tree, u32), usize> = HashMap::new();
    let mut states: Vec<(Tree, u32)> = vec![(init.clone(), flip(neutral))];
    ids.insert((init, flip(neutral)), 0);
    let mut trans = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let tree = states[i].0.clone();
        let mut row = Vec::with_capacity(succ.len());
        for s in succ {
            let (t, p) = step(&tree, s, &accepting, neutral);
            let key = (t, flip(p));
            let id = match ids.get(&key) {
                Some(&id) => id,
                None => {
                    if states.len() >= state_cap {
                        return Err(state_cap);
                    }
                    let id = states.len();
                    ids.insert(key.clone(), id);
                    states.push(key);
                    id
                }
            };
            row.push(id);
        }
        trans.push(row);
        i += 1;
    }
    let priority = states.iter().map(|(_, p)| *p).collect();
    Ok(minimize(&Dpa { trans, priority }))
}

const MERGE_ROUNDS: usize = 8;

/// Moore minimization; states outside every cycle may merge with any state that
/// has the same successors, whatever their priority.
pub fn minimize(d: &Dpa) -> Dpa {
    let n = d.num_states();
    let comp = scc(&d.trans);
    let transient: Vec<bool> = (0..n).map(|s| !comp.nontrivial[comp.id[s]]).collect();
    let mut prio: Vec<u32> = d.priority.clone();
    let mut block: Vec<usize> = refine_blocks(d, |s| prio[s] as usize);
    // a transient state is visited at most once, so its priority is free; adopting
    // a neighbour's priority can oscillate, hence the bounded number of rounds
    for _ in 0..MERGE_ROUNDS {
        let mut changed = false;
        for s in 0..n {
            if !transient[s] {
                continue;
            }
            let sig: Vec<usize> = d.trans[s].iter().map(|&t| block[t]).collect();
            if let Some(t) = (0..n).find(|&t| {
                block[t] != block[s] && prio[t] != prio[s] && d.trans[t].iter().map(|&u| block[u]).eq(sig.iter().copied())
            }) {
                prio[s] = prio[t];
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let p = prio.clone();
        block = refine_blocks(d, |s| p[s] as usize);
    }
    let mut renum: HashMap<usize, usize> = HashMap::new();
    for b in block.iter_mut() {
        let l = renum.len();
        *b = *renum.entry(*b).or_insert(l);
    }
    let count = renum.len();
    let mut trans = vec![Vec::new(); count];
    let mut priority = vec![0; count];
    for s in 0..n {
        let b = block[s];
        if trans[b].is_empty() {
            trans[b] = d.trans[s].iter().map(|&t| block[t]).collect();
            priority[b] = prio[s];
        }
    }
    Dpa { trans, priority }
}

/// Coarsest partition compatible with `initial` and the transition structure.
/// Block ids follow first appearance, so state 0 lands in block 0.
fn refine_blocks(d: &Dpa, initial: impl Fn(usize) -> usize) -> Vec<usize> {
    let n = d.num_states();
    let mut block: Vec<usize> = {
        let mut ids: HashMap<usize, usize> = HashMap::new();
        (0..n)
            .map(|s| {
                let l = ids.len();
                *ids.entry(initial(s)).or_insert(l)
            })
            .collect()
    };
    let mut count = 0;
    loop {
        let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|s| {
                let sig = (block[s], d.trans[s].iter().map(|&t| block[t]).collect());
                let l = ids.len();
                *ids.entry(sig).or_insert(l)
            })
            .collect();
        let c = ids.len();
        block = next;
        if c == count {
            return block;
        }
        count = c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nondep::Alphabet;
    use crate::session::Session;

    #[test]
    fn safety_gives_two_states() {
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let a = s.atom(0);
        let mut n = Nba::new(1);
        n.set_accepting(0, true);
        n.add_edge(&mut s.bdd, 0, 0, a);
        let alpha = Alphabet::new(&mut s, &n, 8).unwrap();
        let succ = alpha.successors(&mut s.bdd, &n);
        let d = determinize(&n, &succ, 100).unwrap();
        assert_eq!(d.num_states(), 2);
        let mut parities: Vec<u32> = d.priority.iter().map(|p| p % 2).collect();
        parities.sort();
        assert_eq!(parities, vec![0, 1]);
        let ai = alpha.atom_of(&s, &[true]);
        let na = alpha.atom_of(&s, &[false]);
        assert!(d.accepts_lasso(&[], &[ai]));
        assert!(!d.accepts_lasso(&[ai], &[ai, na]));
    }

    #[test]
    fn recurrence_is_recognized() {
        // GF a as a two-state NBA: state 1 is entered on a
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let a = s.atom(0);
        let na = s.bdd.not(a);
        let mut n = Nba::new(2);
        n.set_accepting(1, true);
        for src in 0..2 {
            n.add_edge(&mut s.bdd, src, 1, a);
            n.add_edge(&mut s.bdd, src, 0, na);
        }
        let alpha = Alphabet::new(&mut s, &n, 8).unwrap();
        let succ = alpha.successors(&mut s.bdd, &n);
        let d = determinize(&n, &succ, 100).unwrap();
        let (x, y) = (alpha.atom_of(&s, &[true]), alpha.atom_of(&s, &[false]));
        assert!(d.accepts_lasso(&[y, y], &[y, x]));
        assert!(!d.accepts_lasso(&[x, x], &[y]));
    }

    #[test]
    fn persistence_is_recognized() {
        // FG a: guess the point after which a holds forever
        let mut s = Session::with_names(&["a"], &[]).unwrap();
        let a = s.atom(0);
        let t = s.bdd.tt();
        let mut n = Nba::new(2);
        n.set_accepting(1, true);
        n.add_edge(&mut s.bdd, 0, 0, t);
        n.add_edge(&mut s.bdd, 0, 1, a);
        n.add_edge(&mut s.bdd, 1, 1, a);
        let alpha = Alphabet::new(&mut s, &n, 8).unwrap();
        let succ = alpha.successors(&mut s.bdd, &n);
        let d = determinize(&n, &succ, 100).unwrap();
        let (x, y) = (alpha.atom_of(&s, &[true]), alpha.atom_of(&s, &[false]));
        assert!(d.accepts_lasso(&[y, x, y], &[x]));
        assert!(!d.accepts_lasso(&[], &[x, y]));
        assert!(!d.accepts_lasso(&[], &[y]));
    }
}
