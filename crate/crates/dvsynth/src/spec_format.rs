//! Text format for specifications.
//!
//! ```text
//! # comment
//! INPUTS req, ack;
//! OUTPUTS grant;
//! LTL G (req -> F grant);
//! ```
//!
//! Several `LTL` statements are conjoined. Operators from loosest to tightest:
//! `<->`, `->`, `|`, `&`, `U`/`R`, then the prefix operators `! X F G`.
//! `<->`, `->`, `U` and `R` group to the right.

use std::fmt::Write as _;

use dvsynth_core::ltl::{FormulaId, Spec};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

const RESERVED: [&str; 10] = ["X", "U", "R", "F", "G", "true", "false", "INPUTS", "OUTPUTS", "LTL"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    Semi,
    Comma,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Iff => "`<->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            toks.push((Tok::Ident(chars[start..i].iter().collect()), l0, c0));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Implies, 2)
        } else {
            match c {
                '!' => (Tok::Not, 1),
                '&' => (Tok::And, 1),
                '|' => (Tok::Or, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                ';' => (Tok::Semi, 1),
                ',' => (Tok::Comma, 1),
                _ => return Err(err(l0, c0, format!("unexpected character `{c}`"))),
            }
        };
        i += len;
        col += len;
        toks.push((tok, l0, c0));
    }
    toks.push((Tok::Eof, line, col));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: String) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        ParseError { line, col, msg }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {}, found {}", t.describe(), self.peek().describe())))
        }
    }

    fn keyword(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) => Some(s.as_str()),
            _ => None,
        }
    }

    fn names(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Semi {
            self.bump();
            return Ok(out);
        }
        loop {
            match self.peek().clone() {
                Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                    self.bump();
                    out.push(s);
                }
                t => return Err(self.error_here(format!("expected an atom name, found {}", t.describe()))),
            }
            match self.bump() {
                Tok::Comma => continue,
                Tok::Semi => return Ok(out),
                t => {
                    self.pos -= 1;
                    return Err(self.error_here(format!("expected `,` or `;`, found {}", t.describe())));
                }
            }
        }
    }

    fn iff(&mut self, spec: &mut Spec) -> Result<FormulaId, ParseError> {
        let a = self.implies(spec)?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let b = self.iff(spec)?;
            return Ok(spec.iff(a, b));
        }
        Ok(a)
    }

    fn implies(&mut self, spec: &mut Spec) -> Result<FormulaId, ParseError> {
        let a = self.or(spec)?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let b = self.implies(spec)?;
            return Ok(spec.implies(a, b));
        }
        Ok(a)
    }

    fn or(&mut self, spec: &mut Spec) -> Result<FormulaId, ParseError> {
        let mut a = self.and(spec)?;
        while *self.peek() == Tok::Or {
            self.bump();
            let b = self.and(spec)?;
            a = spec.or(a, b);
        }
        Ok(a)
    }

    fn and(&mut self, spec: &mut Spec) -> Result<FormulaId, ParseError> {
        let mut a = self.binary_temporal(spec)?;
        while *self.peek() == Tok::And {
            self.bump();
            let b = self.binary_temporal(spec)?;
            a = spec.and(a, b);
        }
        Ok(a)
    }

    fn binary_temporal(&mut self, spec: &mut Spec) -> Result<FormulaId, ParseError> {
        let a = self.unary(spec)?;
        match self.keyword() {
            Some("U") => {
                self.bump();
                let b = self.binary_temporal(spec)?;
                Ok(spec.until(a, b))
            }
            Some("R") => {
                self.bump();
                let b = self.binary_temporal(spec)?;
                Ok(spec.release(a, b))
            }
            _ => Ok(a),
        }
    }

    fn unary(&mut self, spec: &mut Spec) -> Result<FormulaId, ParseError> {
        let here = self.pos;
        match self.bump() {
            Tok::Not => {
                let a = self.unary(spec)?;
                Ok(spec.not(a))
            }
            Tok::LParen => {
                let a = self.iff(spec)?;
                self.expect(Tok::RParen)?;
                Ok(a)
            }
            Tok::Ident(s) => match s.as_str() {
                "X" => {
                    let a = self.unary(spec)?;
                    Ok(spec.next(a))
                }
                "F" => {
                    let a = self.unary(spec)?;
                    Ok(spec.finally(a))
                }
                "G" => {
                    let a = self.unary(spec)?;
                    Ok(spec.globally(a))
                }
                "true" => Ok(spec.tt()),
                "false" => Ok(spec.ff()),
                "U" | "R" | "INPUTS" | "OUTPUTS" | "LTL" => {
                    self.pos = here;
                    Err(self.error_here(format!("unexpected keyword `{s}`")))
                }
                name => spec.atom(name).map_err(|e| {
                    self.pos = here;
                    self.error_here(e.to_string())
                }),
            },
            t => {
                self.pos = here;
                Err(self.error_here(format!("expected a formula, found {}", t.describe())))
            }
        }
    }
}

/// Parses a specification file.
pub fn parse_spec(text: &str) -> Result<Spec, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut inputs = None;
    let mut outputs = None;
    let mut formulas = Vec::new();
    let mut spec: Option<Spec> = None;
    loop {
        let start = p.pos;
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Ident(k) if k == "INPUTS" || k == "OUTPUTS" => {
                if spec.is_some() {
                    return Err(p.error_here(format!("`{k}` must come before `LTL`")));
                }
                p.bump();
                let slot = if k == "INPUTS" { &mut inputs } else { &mut outputs };
                if slot.is_some() {
                    p.pos = start;
                    return Err(p.error_here(format!("`{k}` declared twice")));
                }
                *slot = Some(p.names()?);
            }
            Tok::Ident(k) if k == "LTL" => {
                p.bump();
                if spec.is_none() {
                    let i = inputs.clone().unwrap_or_default();
                    let o = outputs.clone().unwrap_or_default();
                    spec = Some(Spec::new(&i, &o).map_err(|e| {
                        p.pos = start;
                        p.error_here(e.to_string())
                    })?);
                }
                let s = spec.as_mut().expect("created above");
                formulas.push(p.iff(s)?);
                p.expect(Tok::Semi)?;
            }
            t => return Err(p.error_here(format!("expected `INPUTS`, `OUTPUTS` or `LTL`, found {}", t.describe()))),
        }
    }
    let mut spec = match spec {
        Some(s) => s,
        None => {
            let i = inputs.unwrap_or_default();
            let o = outputs.unwrap_or_default();
            Spec::new(&i, &o).map_err(|e| ParseError {
                line: 1,
                col: 1,
                msg: e.to_string(),
            })?
        }
    };
    let f = spec.and_all(formulas);
    spec.set_formula(f);
    Ok(spec)
}

/// Canonical text of a specification; [`parse_spec`] reads it back to the same formula.
pub fn print_spec(spec: &Spec) -> String {
    let mut s = String::new();
    writeln!(s, "INPUTS {};", spec.inputs().join(", ")).unwrap();
    writeln!(s, "OUTPUTS {};", spec.outputs().join(", ")).unwrap();
    writeln!(s, "LTL {};", spec.display(spec.formula())).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_declarations_and_formula() {
        let s = parse_spec("# copy\nINPUTS i;\nOUTPUTS o;\nLTL G (o <-> i);\n").unwrap();
        assert_eq!(s.inputs(), ["i"]);
        assert_eq!(s.outputs(), ["o"]);
        assert_eq!(s.display(s.formula()).to_string(), "G (o <-> i)");
    }

    #[test]
    fn precedence_and_associativity() {
        let s = parse_spec("INPUTS a, b, c; OUTPUTS; LTL a | b & c -> a U b U c;").unwrap();
        assert_eq!(s.display(s.formula()).to_string(), "a | b & c -> a U b U c");
        let t = parse_spec("INPUTS a, b, c; LTL (a -> b) -> c;").unwrap();
        assert_eq!(t.display(t.formula()).to_string(), "(a -> b) -> c");
    }

    #[test]
    fn several_formulas_are_conjoined() {
        let s = parse_spec("INPUTS a; OUTPUTS b; LTL G a; LTL F b;").unwrap();
        assert_eq!(s.display(s.formula()).to_string(), "G a & F b");
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_spec("INPUTS a;\nLTL a & c;").unwrap_err();
        assert_eq!((e.line, e.col), (2, 9));
        let e = parse_spec("INPUTS a;\nLTL a $ a;").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
        let e = parse_spec("INPUTS a;\nLTL (a;").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
        assert!(parse_spec("INPUTS X;").is_err());
        assert!(parse_spec("INPUTS a; OUTPUTS a;").is_err());
    }

    #[test]
    fn printing_round_trips() {
        let s = parse_spec("INPUTS r; OUTPUTS g, h; LTL G (r -> X (g R !h)) & (true <-> F g);").unwrap();
        let text = print_spec(&s);
        let t = parse_spec(&text).unwrap();
        assert_eq!(print_spec(&t), text);
    }
}
