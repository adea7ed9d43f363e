//! ASCII AIGER (`aag`) with explicit latch reset values and a symbol table.

use std::collections::HashMap;
use std::fmt::Write as _;

use dvsynth_core::depsynth::aig::AigNode;
use dvsynth_core::depsynth::{Aig, Lit};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AigerError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unsupported AIGER feature: {0}")]
    Unsupported(String),
}

fn malformed(line: usize, msg: impl Into<String>) -> AigerError {
    AigerError::Malformed { line, msg: msg.into() }
}

/// Writes `aig` after compaction, so variables are numbered inputs, latches, gates.
pub fn emit_aiger(aig: &Aig) -> String {
    let c = aig.compact();
    let ni = c.inputs().len();
    let nl = c.latches().len();
    let na = c.num_ands();
    let max = c.nodes().len() - 1;
    let mut s = String::new();
    writeln!(s, "aag {max} {ni} {nl} {} {na}", c.outputs().len()).unwrap();
    for (node, _) in c.inputs() {
        writeln!(s, "{}", 2 * node).unwrap();
    }
    for l in c.latches() {
        writeln!(s, "{} {} {}", 2 * l.node, l.next.0, u8::from(l.reset)).unwrap();
    }
    for (l, _) in c.outputs() {
        writeln!(s, "{}", l.0).unwrap();
    }
    for (i, n) in c.nodes().iter().enumerate() {
        if let AigNode::And(a, b) = n {
            writeln!(s, "{} {} {}", 2 * i, a.0.max(b.0), a.0.min(b.0)).unwrap();
        }
    }
    for (k, (_, name)) in c.inputs().iter().enumerate() {
        writeln!(s, "i{k} {name}").unwrap();
    }
    for (k, l) in c.latches().iter().enumerate() {
        writeln!(s, "l{k} {}", l.name).unwrap();
    }
    for (k, (_, name)) in c.outputs().iter().enumerate() {
        writeln!(s, "o{k} {name}").unwrap();
    }
    s
}

fn nums(line: &str, ln: usize, n: usize) -> Result<Vec<u32>, AigerError> {
    let v: Vec<u32> = line
        .split_whitespace()
        .map(|w| w.parse().map_err(|_| malformed(ln, format!("expected a number, found `{w}`"))))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(malformed(ln, format!("expected {n} numbers, found {}", v.len())));
    }
    Ok(v)
}

/// Reads an `aag` file. Gates may appear in any order; cycles are rejected.
pub fn parse_aiger(text: &str) -> Result<Aig, AigerError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| malformed(1, "empty file"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.first() != Some(&"aag") {
        return Err(malformed(ln, "expected `aag` header"));
    }
    if h.len() > 6 {
        return Err(AigerError::Unsupported("bad, constraint, justice or fairness sections".into()));
    }
    let hv = nums(&h[1..].join(" "), ln, 5)?;
    let (max, ni, nl, no, na) = (hv[0], hv[1] as usize, hv[2] as usize, hv[3] as usize, hv[4] as usize);
    let mut next_line = |what: &str| lines.next().ok_or_else(|| malformed(0, format!("missing {what} line")));
    let mut input_vars = Vec::with_capacity(ni);
    for _ in 0..ni {
        let (ln, l) = next_line("input")?;
        let v = nums(l, ln, 1)?[0];
        if v % 2 == 1 || v == 0 || v / 2 > max {
            return Err(malformed(ln, format!("invalid input literal {v}")));
        }
        input_vars.push(v / 2);
    }
    let mut latch_defs = Vec::with_capacity(nl);
    for _ in 0..nl {
        let (ln, l) = next_line("latch")?;
        let v = l.split_whitespace().count();
        let xs = match v {
            2 => {
                let mut x = nums(l, ln, 2)?;
                x.push(0);
                x
            }
            _ => nums(l, ln, 3)?,
        };
        if xs[0] % 2 == 1 || xs[0] == 0 {
            return Err(malformed(ln, format!("invalid latch literal {}", xs[0])));
        }
        let reset = match xs[2] {
            0 => false,
            1 => true,
            r if r == xs[0] => return Err(AigerError::Unsupported("uninitialized latch".into())),
            r => return Err(malformed(ln, format!("invalid reset value {r}"))),
        };
        latch_defs.push((xs[0] / 2, xs[1], reset, ln));
    }
    let mut output_lits = Vec::with_capacity(no);
    for _ in 0..no {
        let (ln, l) = next_line("output")?;
        output_lits.push((nums(l, ln, 1)?[0], ln));
    }
    let mut gates: HashMap<u32, (u32, u32)> = HashMap::new();
    for _ in 0..na {
        let (ln, l) = next_line("and")?;
        let g = nums(l, ln, 3)?;
        if g[0] % 2 == 1 || g[0] == 0 || gates.insert(g[0] / 2, (g[1], g[2])).is_some() {
            return Err(malformed(ln, format!("invalid gate literal {}", g[0])));
        }
    }
    let mut in_names = vec![None; ni];
    let mut latch_names = vec![None; nl];
    let mut out_names = vec![None; no];
    for (ln, l) in lines {
        if l == "c" {
            break;
        }
        let (tag, name) = l.split_once(' ').ok_or_else(|| malformed(ln, "malformed symbol"))?;
        let (kind, idx) = tag.split_at(1);
        let idx: usize = idx.parse().map_err(|_| malformed(ln, "malformed symbol index"))?;
        let slot = match kind {
            "i" => in_names.get_mut(idx),
            "l" => latch_names.get_mut(idx),
            "o" => out_names.get_mut(idx),
            _ => return Err(malformed(ln, format!("unknown symbol kind `{kind}`"))),
        }
        .ok_or_else(|| malformed(ln, "symbol index out of range"))?;
        *slot = Some(name.to_string());
    }

    let mut aig = Aig::new();
    let mut map: HashMap<u32, Lit> = HashMap::new();
    map.insert(0, Lit::FALSE);
    for (k, &v) in input_vars.iter().enumerate() {
        let name = in_names[k].clone().unwrap_or_else(|| format!("i{k}"));
        if map.insert(v, aig.add_input(&name)).is_some() {
            return Err(malformed(0, format!("variable {v} defined twice")));
        }
    }
    let mut latch_idx = Vec::with_capacity(nl);
    for (k, &(v, _, reset, ln)) in latch_defs.iter().enumerate() {
        let name = latch_names[k].clone().unwrap_or_else(|| format!("l{k}"));
        let (idx, lit) = aig.add_latch(&name, reset);
        if map.insert(v, lit).is_some() {
            return Err(malformed(ln, format!("variable {v} defined twice")));
        }
        latch_idx.push(idx);
    }
    let resolve = |aig: &mut Aig, map: &mut HashMap<u32, Lit>, lit: u32| -> Result<Lit, AigerError> {
        let root = lit / 2;
        let mut stack = vec![(root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if map.contains_key(&v) {
                continue;
            }
            let &(a, b) = gates
                .get(&v)
                .ok_or_else(|| malformed(0, format!("variable {v} is never defined")))?;
            if expanded {
                let x = map[&(a / 2)].negate_if(a % 2 == 1);
                let y = map[&(b / 2)].negate_if(b % 2 == 1);
                let g = aig.and(x, y);
                map.insert(v, g);
                continue;
            }
            if stack.iter().any(|&(w, e)| e && w == v) {
                return Err(malformed(0, format!("combinational cycle through variable {v}")));
            }
            stack.push((v, true));
            stack.push((a / 2, false));
            stack.push((b / 2, false));
        }
        Ok(map[&root].negate_if(lit % 2 == 1))
    };
    for (k, &(_, next, _, _)) in latch_defs.iter().enumerate() {
        let n = resolve(&mut aig, &mut map, next)?;
        aig.set_latch_next(latch_idx[k], n);
    }
    for (k, &(lit, _)) in output_lits.iter().enumerate() {
        let l = resolve(&mut aig, &mut map, lit)?;
        let name = out_names[k].clone().unwrap_or_else(|| format!("o{k}"));
        aig.add_output(&name, l);
    }
    Ok(aig)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emits_header_and_symbols() {
        let mut a = Aig::new();
        let i = a.add_input("i");
        a.add_output("o", i);
        a.add_output("__live", Lit::TRUE);
        assert_eq!(emit_aiger(&a), "aag 1 1 0 2 0\n2\n2\n1\ni0 i\no0 o\no1 __live\n");
    }

    #[test]
    fn latch_reset_round_trips() {
        let mut a = Aig::new();
        let i = a.add_input("i");
        let (k, l) = a.add_latch("p0", true);
        let g = a.and(i, l);
        a.set_latch_next(k, g);
        a.add_output("o", !g);
        let text = emit_aiger(&a);
        assert!(text.contains("\n4 6 1\n"));
        let b = parse_aiger(&text).unwrap();
        assert_eq!(emit_aiger(&b), text);
        assert_eq!(b.reset_state(), vec![true]);
    }

    #[test]
    fn gates_in_any_order() {
        let text = "aag 4 2 0 1 2\n2\n4\n9\n8 6 2\n6 2 4\n";
        let a = parse_aiger(text).unwrap();
        assert_eq!(a.step(&[true, true], &[]).0, vec![false]);
        assert_eq!(a.step(&[true, false], &[]).0, vec![true]);
    }

    #[test]
    fn rejects_cycles_and_undefined() {
        assert!(parse_aiger("aag 2 0 0 1 2\n4\n4 2 1\n2 4 1\n").is_err());
        assert!(parse_aiger("aag 2 0 0 1 0\n4\n").is_err());
        assert!(parse_aiger("aig 0 0 0 0 0\n").is_err());
    }
}
