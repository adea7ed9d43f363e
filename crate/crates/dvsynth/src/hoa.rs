//! HOA v1 subset: one initial state, state-based Büchi acceptance, explicit
//! edge labels over the atomic propositions.
//!
//! `controllable-AP` marks outputs. The other propositions are inputs.

use std::fmt::Write as _;

use dvsynth_core::automata::Nba;
use dvsynth_core::{Bdd, Session};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoaError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("unsupported acceptance condition `{0}`")]
    UnsupportedAcceptance(String),
    #[error("missing header item `{0}`")]
    Missing(&'static str),
}

fn malformed(line: usize, msg: impl Into<String>) -> HoaError {
    HoaError::Malformed { line, msg: msg.into() }
}

/// Splits a header value into words, keeping quoted strings whole.
fn words(s: &str, line: usize) -> Result<Vec<String>, HoaError> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut w = String::from("\"");
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some('\\') => w.extend(chars.next()),
                    Some(c) => w.push(c),
                    None => return Err(malformed(line, "unterminated string")),
                }
            }
            out.push(w);
        } else {
            let mut w = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_whitespace() {
                    break;
                }
                w.push(c);
                chars.next();
            }
            out.push(w);
        }
    }
    Ok(out)
}

fn unquote(w: &str, line: usize) -> Result<String, HoaError> {
    w.strip_prefix('"')
        .map(String::from)
        .ok_or_else(|| malformed(line, format!("expected a quoted string, found `{w}`")))
}

fn number(w: &str, line: usize) -> Result<usize, HoaError> {
    w.parse().map_err(|_| malformed(line, format!("expected a number, found `{w}`")))
}

/// Label expression over proposition indices: `t`, `f`, `n`, `!`, `&`, `|`, parentheses.
struct LabelParser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl LabelParser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self, session: &mut Session, aps: &[usize]) -> Result<Bdd, HoaError> {
        let mut a = self.and(session, aps)?;
        while self.eat(b'|') {
            let b = self.and(session, aps)?;
            a = session.bdd.or(a, b);
        }
        Ok(a)
    }

    fn and(&mut self, session: &mut Session, aps: &[usize]) -> Result<Bdd, HoaError> {
        let mut a = self.atom(session, aps)?;
        while self.eat(b'&') {
            let b = self.atom(session, aps)?;
            a = session.bdd.and(a, b);
        }
        Ok(a)
    }

    fn atom(&mut self, session: &mut Session, aps: &[usize]) -> Result<Bdd, HoaError> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(b'!') => {
                self.pos += 1;
                let a = self.atom(session, aps)?;
                Ok(session.bdd.not(a))
            }
            Some(b'(') => {
                self.pos += 1;
                let a = self.or(session, aps)?;
                if !self.eat(b')') {
                    return Err(malformed(self.line, "expected `)` in label"));
                }
                Ok(a)
            }
            Some(b't') => {
                self.pos += 1;
                Ok(session.bdd.tt())
            }
            Some(b'f') => {
                self.pos += 1;
                Ok(session.bdd.ff())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.s.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
                let k: usize = std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().unwrap();
                let atom = *aps
                    .get(k)
                    .ok_or_else(|| malformed(self.line, format!("proposition {k} is not declared")))?;
                Ok(session.atom(atom))
            }
            _ => Err(malformed(self.line, "malformed label")),
        }
    }
}

/// Parses an automaton; the session declares inputs and outputs in `AP` order.
pub fn parse_hoa(text: &str) -> Result<(Session, Nba), HoaError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let mut num_states = None;
    let mut start = None;
    let mut aps: Option<Vec<String>> = None;
    let mut controllable: Vec<usize> = Vec::new();
    let mut acceptance = None;
    let mut saw_version = false;
    for (ln, l) in lines.by_ref() {
        if l.is_empty() {
            continue;
        }
        if l == "--BODY--" {
            break;
        }
        let (key, rest) = l
            .split_once(':')
            .ok_or_else(|| malformed(ln, format!("expected `name: value`, found `{l}`")))?;
        let w = words(rest, ln)?;
        match key.trim() {
            "HOA" => {
                if w.first().map(String::as_str) != Some("v1") {
                    return Err(malformed(ln, "only HOA v1 is supported"));
                }
                saw_version = true;
            }
            "States" => num_states = Some(number(w.first().map_or("", |s| s), ln)?),
            "Start" => {
                if start.is_some() || w.len() != 1 {
                    return Err(malformed(ln, "exactly one initial state is supported"));
                }
                start = Some(number(&w[0], ln)?);
            }
            "AP" => {
                let n = number(w.first().map_or("", |s| s), ln)?;
                let names = w[1..].iter().map(|s| unquote(s, ln)).collect::<Result<Vec<_>, _>>()?;
                if names.len() != n {
                    return Err(malformed(ln, format!("AP declares {n} names but lists {}", names.len())));
                }
                aps = Some(names);
            }
            "controllable-AP" => {
                controllable = w.iter().map(|s| number(s, ln)).collect::<Result<_, _>>()?;
            }
            "Acceptance" => acceptance = Some(w.join(" ")),
            _ => {}
        }
    }
    if !saw_version {
        return Err(HoaError::Missing("HOA"));
    }
    let aps = aps.ok_or(HoaError::Missing("AP"))?;
    let acceptance = acceptance.ok_or(HoaError::Missing("Acceptance"))?;
    let all_accepting = match acceptance.replace(' ', "").as_str() {
        "1Inf(0)" => false,
        "0t" => true,
        _ => return Err(HoaError::UnsupportedAcceptance(acceptance)),
    };
    let start = start.ok_or(HoaError::Missing("Start"))?;
    let num_states = num_states.ok_or(HoaError::Missing("States"))?;
    if start >= num_states {
        return Err(malformed(0, "initial state out of range"));
    }
    if let Some(&k) = controllable.iter().find(|&&k| k >= aps.len()) {
        return Err(malformed(0, format!("controllable proposition {k} is not declared")));
    }
    let ins: Vec<String> = (0..aps.len()).filter(|k| !controllable.contains(k)).map(|k| aps[k].clone()).collect();
    let outs: Vec<String> = (0..aps.len()).filter(|k| controllable.contains(k)).map(|k| aps[k].clone()).collect();
    let mut session = Session::new(&ins, &outs).map_err(|e| malformed(0, e.to_string()))?;
    let atom_of: Vec<usize> = aps
        .iter()
        .map(|n| session.vocab.atom_by_name(n).expect("declared above"))
        .collect();
    // the initial state becomes state 0
    let renum = |q: usize| {
        if q == start {
            0
        } else if q == 0 {
            start
        } else {
            q
        }
    };
    let mut nba = Nba::new(num_states);
    let mut current: Option<usize> = None;
    let mut ended = false;
    for (ln, l) in lines {
        if l.is_empty() {
            continue;
        }
        if l == "--END--" {
            ended = true;
            break;
        }
        if let Some(rest) = l.strip_prefix("State:") {
            let rest = rest.trim();
            if rest.starts_with('[') {
                return Err(malformed(ln, "state labels are not supported"));
            }
            let id_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let q = number(&rest[..id_end], ln)?;
            if q >= num_states {
                return Err(malformed(ln, format!("state {q} out of range")));
            }
            let tail = rest[id_end..].trim();
            let tail = match tail.strip_prefix('"') {
                Some(t) => t.split_once('"').map(|(_, r)| r.trim()).ok_or_else(|| malformed(ln, "unterminated state name"))?,
                None => tail,
            };
            let acc = match tail.strip_prefix('{') {
                Some(t) => {
                    let inner = t.strip_suffix('}').ok_or_else(|| malformed(ln, "unterminated acceptance set"))?;
                    let sets: Vec<usize> = inner.split_whitespace().map(|s| number(s, ln)).collect::<Result<_, _>>()?;
                    if sets.iter().any(|&s| s != 0) {
                        return Err(malformed(ln, "only acceptance set 0 is supported"));
                    }
                    !sets.is_empty()
                }
                None if tail.is_empty() => false,
                None => return Err(malformed(ln, format!("unexpected `{tail}`"))),
            };
            nba.set_accepting(renum(q), acc || all_accepting);
            current = Some(renum(q));
            continue;
        }
        let src = current.ok_or_else(|| malformed(ln, "edge before any state"))?;
        let body = l
            .strip_prefix('[')
            .ok_or_else(|| malformed(ln, "edges must carry an explicit label"))?;
        let (label_text, rest) = body.split_once(']').ok_or_else(|| malformed(ln, "unterminated label"))?;
        let mut lp = LabelParser {
            s: label_text.as_bytes(),
            pos: 0,
            line: ln,
        };
        let label = lp.or(&mut session, &atom_of)?;
        lp.skip_ws();
        if lp.pos != lp.s.len() {
            return Err(malformed(ln, "trailing characters in label"));
        }
        let rest = rest.trim();
        if rest.contains('{') {
            return Err(malformed(ln, "transition-based acceptance is not supported"));
        }
        let dst = number(rest, ln)?;
        if dst >= num_states {
            return Err(malformed(ln, format!("state {dst} out of range")));
        }
        nba.add_edge(&mut session.bdd, src, renum(dst), label);
    }
    if !ended {
        return Err(HoaError::Missing("--END--"));
    }
    Ok((session, nba))
}

fn label_text(session: &Session, label: Bdd) -> String {
    let mgr = &session.bdd;
    if mgr.is_true(label) {
        return "t".into();
    }
    if mgr.is_false(label) {
        return "f".into();
    }
    let cubes: Vec<String> = mgr
        .cubes(label)
        .iter()
        .map(|c| {
            let mut lits: Vec<(usize, bool)> = c
                .iter()
                .map(|&(v, pos)| (session.vocab.atom_of_var(v).expect("label over current-step atoms").0, pos))
                .collect();
            lits.sort_unstable();
            let parts: Vec<String> = lits
                .iter()
                .map(|&(a, pos)| if pos { a.to_string() } else { format!("!{a}") })
                .collect();
            if parts.is_empty() {
                "t".to_string()
            } else {
                parts.join("&")
            }
        })
        .collect();
    if cubes.len() == 1 {
        cubes[0].clone()
    } else {
        cubes.iter().map(|c| format!("({c})")).collect::<Vec<_>>().join(" | ")
    }
}

/// Writes an automaton; propositions are the session's atoms in order.
pub fn emit_hoa(session: &Session, nba: &Nba, name: &str) -> String {
    let v = &session.vocab;
    let mut s = String::new();
    writeln!(s, "HOA: v1").unwrap();
    writeln!(s, "name: \"{}\"", name.replace('\\', "\\\\").replace('"', "\\\"")).unwrap();
    writeln!(s, "States: {}", nba.num_states()).unwrap();
    writeln!(s, "Start: {}", nba.initial()).unwrap();
    let names: Vec<String> = (0..v.num_atoms()).map(|a| format!(" \"{}\"", v.atom_name(a))).collect();
    writeln!(s, "AP: {}{}", v.num_atoms(), names.concat()).unwrap();
    let ctl: Vec<String> = v.output_atoms().map(|a| format!(" {a}")).collect();
    writeln!(s, "controllable-AP:{}", ctl.concat()).unwrap();
    writeln!(s, "acc-name: Buchi").unwrap();
    writeln!(s, "Acceptance: 1 Inf(0)").unwrap();
    writeln!(s, "properties: trans-labels explicit-labels state-acc").unwrap();
    writeln!(s, "--BODY--").unwrap();
    for q in 0..nba.num_states() {
        let acc = if nba.is_accepting(q) { " {0}" } else { "" };
        writeln!(s, "State: {q}{acc}").unwrap();
        for e in nba.out_edges(q) {
            writeln!(s, "[{}] {}", label_text(session, e.label), e.dst).unwrap();
        }
    }
    writeln!(s, "--END--").unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const GA: &str = "HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[0] 0\n--END--\n";

    #[test]
    fn parses_one_state() {
        let (s, n) = parse_hoa(GA).unwrap();
        assert_eq!(s.vocab.inputs(), ["a"]);
        assert_eq!(n.num_states(), 1);
        assert!(n.is_accepting(0));
        assert_eq!(n.edges().len(), 1);
    }

    #[test]
    fn round_trip() {
        let (s, n) = parse_hoa(GA).unwrap();
        let text = emit_hoa(&s, &n, "G a");
        let (s2, n2) = parse_hoa(&text).unwrap();
        assert_eq!(emit_hoa(&s2, &n2, "G a"), text);
    }

    #[test]
    fn rejects_fin() {
        let t = GA.replace("Inf(0)", "Fin(0)");
        assert!(matches!(parse_hoa(&t), Err(HoaError::UnsupportedAcceptance(_))));
    }

    #[test]
    fn rejects_missing_ap() {
        let t = GA.replace("AP: 1 \"a\"\n", "");
        assert_eq!(parse_hoa(&t).unwrap_err(), HoaError::Missing("AP"));
    }

    #[test]
    fn moves_the_initial_state_to_zero() {
        let t = "HOA: v1\nStates: 2\nStart: 1\nAP: 1 \"a\"\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[t] 0\nState: 1\n[!0] 0\n--END--\n";
        let (_, n) = parse_hoa(t).unwrap();
        assert!(n.is_accepting(1));
        assert!(!n.is_accepting(0));
        assert!(n.edge(0, 1).is_some());
        assert!(n.edge(1, 1).is_some());
    }
}
