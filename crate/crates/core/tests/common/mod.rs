//! Explicit-state oracles and random generators shared by the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use dvsynth_core::automata::Nba;
use dvsynth_core::dependency::find_maximal_dependent_set;
use dvsynth_core::depsynth::{ExplicitTX, TxCircuit};
use dvsynth_core::ltl::{Formula, FormulaId, Spec};
use dvsynth_core::nondep::{zielonka, ParityGame, Player};
use dvsynth_core::session::{bits, Session};
use dvsynth_core::{Bdd, BddManager, NoClock, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn letters(width: usize) -> Vec<Vec<bool>> {
    (0..1u64 << width).map(|k| bits(k, width)).collect()
}

/// Session with `ni` inputs named `i0..` and `no` outputs named `o0..`.
pub fn session(ni: usize, no: usize) -> Session {
    let i: Vec<String> = (0..ni).map(|k| format!("i{k}")).collect();
    let o: Vec<String> = (0..no).map(|k| format!("o{k}")).collect();
    Session::new(&i, &o).unwrap()
}

/// Random automaton over the session atoms, trimmed. Labels are unions of
/// random letters. With `functional`, the last output is a fixed function of the
/// other atoms on every edge, which makes it dependent.
pub fn random_nba(rng: &mut ChaCha8Rng, s: &mut Session, max_states: usize, functional: bool) -> Nba {
    let m = s.vocab.num_atoms();
    let atoms: Vec<usize> = (0..m).collect();
    let n = rng.gen_range(1..=max_states);
    let table: Vec<bool> = (0..1usize << (m - 1)).map(|_| rng.gen()).collect();
    let allowed = |l: &[bool]| {
        let k = l[..m - 1].iter().enumerate().fold(0, |a, (j, &b)| a | (usize::from(b) << j));
        l[m - 1] == table[k]
    };
    let mut a = Nba::new(n);
    for q in 0..n {
        a.set_accepting(q, rng.gen_bool(0.4));
    }
    a.set_accepting(rng.gen_range(0..n), true);
    for src in 0..n {
        for dst in 0..n {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let mut label = s.bdd.ff();
            for l in letters(m) {
                if rng.gen_bool(0.35) && (!functional || allowed(&l)) {
                    let c = s.letter_cube(&atoms, &l);
                    label = s.bdd.or(label, c);
                }
            }
            a.add_edge(&mut s.bdd, src, dst, label);
        }
    }
    a.trim()
}

/// Random nonempty trimmed automaton.
pub fn random_nonempty_nba(rng: &mut ChaCha8Rng, s: &mut Session, max_states: usize, functional: bool) -> Nba {
    loop {
        let a = random_nba(rng, s, max_states, functional);
        if a.num_states() > 0 && !a.edges().is_empty() {
            return a;
        }
    }
}

/// Successor sets of a state set on a concrete letter.
pub fn post(s: &Session, a: &Nba, set: &BTreeSet<usize>, l: &[bool]) -> BTreeSet<usize> {
    set.iter().flat_map(|&q| a.successors(s, q, l)).collect()
}

/// Pairs reached from `(q0, q0)` by reading one word in both components.
pub fn explicit_pairs(s: &Session, a: &Nba) -> BTreeSet<(usize, usize)> {
    let ls = letters(s.vocab.num_atoms());
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    if a.num_states() == 0 {
        return seen;
    }
    seen.insert((0, 0));
    queue.push_back((0, 0));
    while let Some((p, q)) = queue.pop_front() {
        for l in &ls {
            for p2 in a.successors(s, p, l) {
                for q2 in a.successors(s, q, l) {
                    if seen.insert((p2, q2)) {
                        queue.push_back((p2, q2));
                    }
                }
            }
        }
    }
    seen
}

/// Every state set reachable from `{q0}` by a finite word.
pub fn reachable_subsets(s: &Session, a: &Nba) -> Vec<BTreeSet<usize>> {
    let ls = letters(s.vocab.num_atoms());
    let start: BTreeSet<usize> = [a.initial()].into();
    let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
    let mut out = vec![];
    let mut queue = VecDeque::from([start.clone()]);
    seen.insert(start);
    while let Some(u) = queue.pop_front() {
        for l in &ls {
            let v = post(s, a, &u, l);
            if !v.is_empty() && seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
        out.push(u);
    }
    out
}

/// Language-level dependency of the atoms `xs` on the atoms `ys`, decided on
/// a trimmed automaton: every finite run extends to an accepting one, so a
/// violation is a reachable set of states whose enabled letters contain two
/// letters agreeing on `ys` and differing on `xs`.
pub fn semantic_dependent(s: &Session, a: &Nba, xs: &[usize], ys: &[usize]) -> bool {
    let ls = letters(s.vocab.num_atoms());
    for u in reachable_subsets(s, a) {
        let enabled: Vec<&Vec<bool>> = ls.iter().filter(|l| !post(s, a, &u, l).is_empty()).collect();
        for x in &enabled {
            for y in &enabled {
                if ys.iter().all(|&k| x[k] == y[k]) && xs.iter().any(|&k| x[k] != y[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// All atoms except `xs`.
pub fn rest(s: &Session, xs: &[usize]) -> Vec<usize> {
    (0..s.vocab.num_atoms()).filter(|a| !xs.contains(a)).collect()
}

/// Truth of every subformula at every position of `stem · cycle^ω`.
pub fn eval_lasso(spec: &Spec, f: FormulaId, stem: &[Vec<bool>], cycle: &[Vec<bool>]) -> bool {
    let len = stem.len() + cycle.len();
    let word: Vec<&Vec<bool>> = stem.iter().chain(cycle).collect();
    let next = |p: usize| if p + 1 < len { p + 1 } else { stem.len() };
    let mut memo: HashMap<FormulaId, Vec<bool>> = HashMap::new();
    fn go(
        spec: &Spec,
        f: FormulaId,
        word: &[&Vec<bool>],
        next: &dyn Fn(usize) -> usize,
        memo: &mut HashMap<FormulaId, Vec<bool>>,
    ) -> Vec<bool> {
        if let Some(v) = memo.get(&f) {
            return v.clone();
        }
        let len = word.len();
        let mut sub = |g: FormulaId| go(spec, g, word, next, memo);
        let fix = |init: bool, step: &dyn Fn(usize, &[bool]) -> bool| {
            let mut v = vec![init; len];
            for _ in 0..=len {
                v = (0..len).map(|p| step(p, &v)).collect();
            }
            v
        };
        let v = match spec.node(f) {
            Formula::True => vec![true; len],
            Formula::False => vec![false; len],
            Formula::Atom(k) => word.iter().map(|l| l[k as usize]).collect(),
            Formula::Not(a) => sub(a).iter().map(|b| !b).collect(),
            Formula::And(a, b) => zip(&sub(a), &sub(b), |x, y| x && y),
            Formula::Or(a, b) => zip(&sub(a), &sub(b), |x, y| x || y),
            Formula::Implies(a, b) => zip(&sub(a), &sub(b), |x, y| !x || y),
            Formula::Iff(a, b) => zip(&sub(a), &sub(b), |x, y| x == y),
            Formula::Next(a) => {
                let va = sub(a);
                (0..len).map(|p| va[next(p)]).collect()
            }
            Formula::Until(a, b) => {
                let (va, vb) = (sub(a), sub(b));
                fix(false, &|p, v| vb[p] || (va[p] && v[next(p)]))
            }
            Formula::Release(a, b) => {
                let (va, vb) = (sub(a), sub(b));
                fix(true, &|p, v| vb[p] && (va[p] || v[next(p)]))
            }
            Formula::Finally(a) => {
                let va = sub(a);
                fix(false, &|p, v| va[p] || v[next(p)])
            }
            Formula::Globally(a) => {
                let va = sub(a);
                fix(true, &|p, v| va[p] && v[next(p)])
            }
        };
        memo.insert(f, v.clone());
        v
    }
    go(spec, f, &word, &next, &mut memo)[0]
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// All lassos with `stem.len() + cycle.len() <= max_len` over letters of `width`.
pub fn lassos(width: usize, max_len: usize) -> Vec<(Vec<Vec<bool>>, Vec<Vec<bool>>)> {
    let ls = letters(width);
    let mut out = vec![];
    for len in 1..=max_len {
        let total = ls.len().pow(len as u32);
        for code in 0..total {
            let mut c = code;
            let word: Vec<Vec<bool>> = (0..len)
                .map(|_| {
                    let l = ls[c % ls.len()].clone();
                    c /= ls.len();
                    l
                })
                .collect();
            for split in 0..len {
                out.push((word[..split].to_vec(), word[split..].to_vec()));
            }
        }
    }
    out
}

/// Random formula over the spec atoms with at most `depth` nested operators.
pub fn random_formula(rng: &mut ChaCha8Rng, spec: &mut Spec, depth: usize) -> FormulaId {
    let n_atoms = (spec.inputs().len() + spec.outputs().len()) as u32;
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..10) {
            0 => spec.tt(),
            1 => spec.ff(),
            _ => spec.mk(Formula::Atom(rng.gen_range(0..n_atoms))),
        };
    }
    let a = random_formula(rng, spec, depth - 1);
    match rng.gen_range(0..11) {
        0 => spec.not(a),
        1 => spec.next(a),
        2 => spec.finally(a),
        3 => spec.globally(a),
        k => {
            let b = random_formula(rng, spec, depth - 1);
            match k {
                4 => spec.and(a, b),
                5 => spec.or(a, b),
                6 => spec.implies(a, b),
                7 => spec.iff(a, b),
                8 | 9 => spec.until(a, b),
                _ => spec.release(a, b),
            }
        }
    }
}

/// Random max-parity game where every node has one to three successors.
pub fn random_game(rng: &mut ChaCha8Rng, max_nodes: usize, max_prio: u32) -> ParityGame {
    let n = rng.gen_range(1..=max_nodes);
    let owner = (0..n)
        .map(|_| if rng.gen() { Player::Even } else { Player::Odd })
        .collect();
    let priority = (0..n).map(|_| rng.gen_range(0..=max_prio)).collect();
    let succ = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=3);
            let mut s: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    ParityGame { owner, priority, succ }
}

/// Nodes from which every infinite path in the one-player graph `succ` has an
/// even maximal recurring priority.
pub fn all_cycles_even(succ: &[Vec<usize>], prio: &[u32]) -> Vec<bool> {
    let n = succ.len();
    // bad[v]: v lies on a cycle whose maximum priority is odd
    let mut bad = vec![false; n];
    for p in (1..=prio.iter().copied().max().unwrap_or(0)).step_by(2) {
        for v in (0..n).filter(|&v| prio[v] == p) {
            // cycle through v using only nodes of priority <= p
            let mut seen = vec![false; n];
            let mut stack: Vec<usize> = succ[v].iter().copied().filter(|&w| prio[w] <= p).collect();
            while let Some(w) = stack.pop() {
                if w == v {
                    bad[v] = true;
                    break;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.extend(succ[w].iter().copied().filter(|&x| prio[x] <= p));
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let mut seen = vec![false; n];
            let mut stack = vec![v];
            while let Some(w) = stack.pop() {
                if bad[w] {
                    return false;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.extend(succ[w].iter().copied());
                }
            }
            true
        })
        .collect()
}

/// Winner of each node by enumerating positional strategies of `who`: `who`
/// wins from `v` iff some strategy makes every reachable cycle good for it.
pub fn enumerate_winners(g: &ParityGame, who: Player) -> Vec<bool> {
    let n = g.num_nodes();
    let mine: Vec<usize> = (0..n).filter(|&v| g.owner[v] == who).collect();
    // a cycle is good for Odd when its max is odd; shift priorities by one
    let prio: Vec<u32> = g.priority.iter().map(|&p| if who == Player::Even { p } else { p + 1 }).collect();
    let mut win = vec![false; n];
    let mut choice = vec![0usize; mine.len()];
    loop {
        let succ: Vec<Vec<usize>> = (0..n)
            .map(|v| match mine.iter().position(|&m| m == v) {
                Some(k) => vec![g.succ[v][choice[k]]],
                None => g.succ[v].clone(),
            })
            .collect();
        for (v, w) in all_cycles_even(&succ, &prio).into_iter().enumerate() {
            win[v] |= w;
        }
        let mut k = 0;
        loop {
            if k == mine.len() {
                return win;
            }
            choice[k] += 1;
            if choice[k] < g.succ[mine[k]].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

pub fn random_bdd(rng: &mut ChaCha8Rng) -> (BddManager, Vec<VarId>, Bdd, Vec<VarId>) {
    let mut m = BddManager::new();
    let n = rng.gen_range(1..=8);
    let vars: Vec<VarId> = (0..n).map(|k| m.new_var(&format!("v{k}")).unwrap()).collect();
    let density = rng.gen_range(0.05..0.95);
    let table: Vec<bool> = (0..1usize << n).map(|_| rng.gen_bool(density)).collect();
    let b = m.from_truth_table(&vars, |k| table[k as usize]);
    let mut xs: Vec<VarId> = vars.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if xs.is_empty() {
        xs.push(vars[rng.gen_range(0..n)]);
    }
    if rng.gen() {
        xs.reverse();
    }
    (m, vars, b, xs)
}

/// `∃xs. b → b[xs ↦ F]`, checked on every assignment and as a BDD tautology.
pub fn skolem_holds(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut m, vars, b, xs) = random_bdd(&mut rng);
    let fs = m.skolem(b, &xs);
    for f in &fs {
        if m.support(*f).iter().any(|v| xs.contains(v)) {
            return Err("function mentions a quantified variable".into());
        }
    }
    let n = vars.len();
    for k in 0..1u64 << n {
        let val: Vec<bool> = (0..m.var_count()).map(|j| k >> j & 1 == 1).collect();
        let sat = (0..1u64 << xs.len()).any(|c| {
            let mut v = val.clone();
            for (j, x) in xs.iter().enumerate() {
                v[x.index()] = c >> j & 1 == 1;
            }
            m.eval(b, &v)
        });
        let mut w = val.clone();
        for (x, f) in xs.iter().zip(&fs) {
            w[x.index()] = m.eval(*f, &val);
        }
        if sat && !m.eval(b, &w) {
            return Err(format!("assignment {k:b}"));
        }
    }
    let mut sub = b;
    for (x, f) in xs.iter().zip(&fs) {
        sub = m.substitute(sub, *x, *f).unwrap();
    }
    let ex = m.exists(b, &xs);
    let claim = m.implies(ex, sub);
    if !m.is_true(claim) {
        return Err("implication is not a tautology".into());
    }
    Ok(())
}

pub fn zielonka_agrees(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_game(&mut rng, 8, 3);
    let sol = zielonka(&g);
    let even = enumerate_winners(&g, Player::Even);
    let odd = enumerate_winners(&g, Player::Odd);
    for v in 0..g.num_nodes() {
        if even[v] == odd[v] {
            return Err(format!("oracle not determined at {v}"));
        }
        let w = if even[v] { Player::Even } else { Player::Odd };
        if sol.winner[v] != w {
            return Err(format!("node {v}: solver {:?}, oracle {w:?}", sol.winner[v]));
        }
    }
    // the returned strategies are winning on their own
    for who in [Player::Even, Player::Odd] {
        let succ: Vec<Vec<usize>> = (0..g.num_nodes())
            .map(|v| match (g.owner[v] == who && sol.winner[v] == who, sol.strategy[v]) {
                (true, Some(k)) => vec![g.succ[v][k]],
                (true, None) => vec![],
                _ => g.succ[v].clone(),
            })
            .collect();
        if succ.iter().any(Vec::is_empty) {
            return Err("winning owner node without a move".into());
        }
        let prio: Vec<u32> = g.priority.iter().map(|&p| if who == Player::Even { p } else { p + 1 }).collect();
        let good = all_cycles_even(&succ, &prio);
        for v in 0..g.num_nodes() {
            if sol.winner[v] == who && !good[v] {
                return Err(format!("strategy of {who:?} loses from {v}"));
            }
        }
    }
    Ok(())
}

/// Walks every driver word up to `depth` letters through both machines in
/// lockstep; joint states already seen at a smaller depth are not revisited.
pub fn bisimilar(tx: &ExplicitTX, c: &TxCircuit, depth: usize) -> Result<(), String> {
    let reset = c.aig.reset_state();
    if TxCircuit::subset(&reset) != tx.states[0] {
        return Err(format!("reset {:?} vs {:?}", TxCircuit::subset(&reset), tx.states[0]));
    }
    let ls = letters(tx.drivers.len());
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(0usize, reset, 0usize)]);
    while let Some((st, latches, d)) = queue.pop_front() {
        if d == depth || !seen.insert((st, latches.clone())) {
            continue;
        }
        for l in &ls {
            let (outs, live, next) = c.step(l, &latches);
            match &tx.trans[st][ExplicitTX::letter_index(l)] {
                None if live => return Err(format!("live circuit at ⊥ from {:?} on {l:?}", tx.states[st])),
                None => {}
                Some(_) if !live => return Err(format!("circuit ⊥ from {:?} on {l:?}", tx.states[st])),
                Some((o, t)) => {
                    if *o != outs || TxCircuit::subset(&next) != tx.states[*t] {
                        return Err(format!("step from {:?} on {l:?}", tx.states[st]));
                    }
                    queue.push_back((*t, next, d + 1));
                }
            }
        }
    }
    Ok(())
}

pub fn dependent_case(rng: &mut ChaCha8Rng, ni: usize, no: usize) -> (Session, Nba, Vec<usize>) {
    loop {
        let mut s = session(ni, no);
        let a = random_nonempty_nba(rng, &mut s, 5, true);
        let order: Vec<usize> = s.vocab.output_atoms().collect();
        let xs = find_maximal_dependent_set(&mut s, &a, &order, None, &NoClock).dependent;
        if !xs.is_empty() {
            return (s, a, xs);
        }
    }
}
