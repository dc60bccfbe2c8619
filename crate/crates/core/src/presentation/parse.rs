//! Parser for `ring Z[g1,...,gk] / rel ; rel ; ...`.
//!
//! A relation is a chain `p = q = ... = r` of integer polynomials; each part
//! is set equal to the last one. Products may be written with `*` or by
//! juxtaposition (`2(1 + a1)`), powers with `^`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::PresentationError;
use crate::rational::Z;

/// Integer polynomial, keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Z>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Z) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.add_term(e, Z::one());
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Z) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Z::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut p = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::constant(self.nvars, Z::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut terms: Vec<(&Vec<u32>, &Z)> = self.terms.iter().collect();
        // highest degree first, then lexicographic on exponents descending
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        let mut out = String::new();
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], x)
                    }
                })
                .collect();
            let mono = mono.join("*");
            let abs = c.abs();
            let body = match (mono.is_empty(), abs.is_one()) {
                (true, _) => abs.to_string(),
                (false, true) => mono,
                (false, false) => format!("{abs}*{mono}"),
            };
            match (k, c.is_negative()) {
                (0, true) => out.push_str(&format!("-{body}")),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(Z),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Num(n) => write!(f, "{n}"),
            Tok::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PresentationError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = vec![];
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push((start, Tok::Num(s.parse().expect("digits"))));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
        } else if "[],/;=+-*^()−".contains(c) {
            // U+2212 minus sign is accepted as '-'
            out.push((i, Tok::Sym(if c == '−' { '-' } else { c })));
            i += 1;
        } else {
            return Err(PresentationError::Syntax {
                pos: i,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    gens: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PresentationError> {
        Err(PresentationError::Syntax {
            pos: self.here(),
            msg: msg.into(),
        })
    }

    fn expect_sym(&mut self, c: char) -> Result<(), PresentationError> {
        match self.peek() {
            Some(Tok::Sym(x)) if *x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => self.err(format!("expected '{c}', found '{t}'")),
            None => self.err(format!("expected '{c}', found end of input")),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(x)) if *x == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> Result<String, PresentationError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            Some(t) => self.err(format!("expected a name, found '{t}'")),
            None => self.err("expected a name, found end of input"),
        }
    }

    fn header(&mut self) -> Result<(), PresentationError> {
        match self.expect_ident()?.as_str() {
            "ring" => {}
            other => {
                self.pos -= 1;
                return self.err(format!("expected 'ring', found '{other}'"));
            }
        }
        if self.expect_ident()? != "Z" {
            self.pos -= 1;
            return self.err("expected base ring 'Z'");
        }
        self.expect_sym('[')?;
        loop {
            let at = self.here();
            let g = self.expect_ident()?;
            if self.gens.contains(&g) {
                return Err(PresentationError::Syntax {
                    pos: at,
                    msg: format!("duplicate generator {g}"),
                });
            }
            self.gens.push(g);
            if !self.eat_sym(',') {
                break;
            }
        }
        self.expect_sym(']')?;
        self.expect_sym('/')
    }

    fn relations(&mut self) -> Result<Vec<(Poly, String)>, PresentationError> {
        let mut rels = vec![];
        loop {
            if self.peek().is_none() {
                break;
            }
            let start = self.pos;
            let mut parts = vec![self.expr()?];
            while self.eat_sym('=') {
                parts.push(self.expr()?);
            }
            if parts.len() < 2 {
                return self.err("expected '=' in relation");
            }
            let text = self.toks[start..self.pos]
                .iter()
                .map(|(_, t)| t.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let last = parts.pop().expect("at least two parts");
            for p in parts {
                rels.push((p.sub(&last), text.clone()));
            }
            if !self.eat_sym(';') {
                break;
            }
        }
        if let Some(t) = self.peek() {
            return self.err(format!("unexpected '{t}' after relation"));
        }
        if rels.is_empty() {
            return self.err("no relations");
        }
        Ok(rels)
    }

    fn expr(&mut self) -> Result<Poly, PresentationError> {
        let n = self.gens.len();
        let mut acc = Poly::zero(n);
        let mut sign = if self.eat_sym('-') {
            -1
        } else {
            self.eat_sym('+');
            1
        };
        loop {
            let t = self.term()?;
            acc = if sign < 0 { acc.sub(&t) } else { acc.add(&t) };
            if self.eat_sym('+') {
                sign = 1;
            } else if self.eat_sym('-') {
                sign = -1;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn term(&mut self) -> Result<Poly, PresentationError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat_sym('*') || self.starts_factor() {
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, PresentationError> {
        let base = self.atom()?;
        if self.eat_sym('^') {
            match self.peek().cloned() {
                Some(Tok::Num(k)) => {
                    self.pos += 1;
                    let k: u32 = k
                        .try_into()
                        .or_else(|_| self.err("exponent too large"))?;
                    Ok(base.pow(k))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Poly, PresentationError> {
        let n = self.gens.len();
        match self.peek().cloned() {
            Some(Tok::Num(c)) => {
                self.pos += 1;
                Ok(Poly::constant(n, c))
            }
            Some(Tok::Ident(name)) => match self.gens.iter().position(|g| *g == name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(Poly::var(n, i))
                }
                None => self.err(format!("unknown generator {name}")),
            },
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected '{t}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

pub type Parsed = (Vec<String>, Vec<(Poly, String)>);

/// Generators and normalized relations (`p = 0`), with the source text of
/// the relation each came from.
pub fn parse(text: &str) -> Result<Parsed, PresentationError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        gens: vec![],
    };
    p.header()?;
    let rels = p.relations()?;
    Ok((p.gens, rels))
}
