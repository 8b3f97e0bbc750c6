//! Initial-profile expressions in the variable `k`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' atom)?
//! atom   := number | 'k' | ident '(' args ')' | '(' expr ')' | '-' atom
//! args   := expr (',' expr)*
//! ```
//!
//! Functions: `exp(x)`, `sinh(x)`. Presets: `constant(c)`, `power(p)` or
//! `power(a, p)` for `a k^p`, and `gauss_bump(a, k0, s)` (also spelled
//! `gauss-bump`) for `a exp(-(k-k0)^2 / (2 s^2))`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sinh,
    Constant,
    Power,
    GaussBump,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sinh => "sinh",
            Func::Constant => "constant",
            Func::Power => "power",
            Func::GaussBump => "gauss_bump",
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sinh" => Func::Sinh,
            "constant" => Func::Constant,
            "power" => Func::Power,
            "gauss_bump" | "gauss-bump" => Func::GaussBump,
            _ => return None,
        })
    }

    fn arities(self) -> &'static [usize] {
        match self {
            Func::Exp | Func::Sinh | Func::Constant => &[1],
            Func::Power => &[1, 2],
            Func::GaussBump => &[3],
        }
    }
}

/// Literals are always non-negative; a leading minus parses as `Neg`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileExpr {
    Num(f64),
    K,
    Neg(Box<ProfileExpr>),
    Bin(BinOp, Box<ProfileExpr>, Box<ProfileExpr>),
    Call(Func, Vec<ProfileExpr>),
}

impl ProfileExpr {
    pub fn eval(&self, k: f64) -> f64 {
        match self {
            ProfileExpr::Num(v) => *v,
            ProfileExpr::K => k,
            ProfileExpr::Neg(a) => -a.eval(k),
            ProfileExpr::Bin(op, a, b) => {
                let (a, b) = (a.eval(k), b.eval(k));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            ProfileExpr::Call(f, args) => {
                let v: Vec<f64> = args.iter().map(|a| a.eval(k)).collect();
                match (f, v.as_slice()) {
                    (Func::Exp, [x]) => x.exp(),
                    (Func::Sinh, [x]) => x.sinh(),
                    (Func::Constant, [c]) => *c,
                    (Func::Power, [p]) => k.powf(*p),
                    (Func::Power, [a, p]) => a * k.powf(*p),
                    (Func::GaussBump, [a, k0, s]) => {
                        let z = (k - k0) / s;
                        a * (-0.5 * z * z).exp()
                    }
                    _ => f64::NAN,
                }
            }
        }
    }

    /// Evaluates on every node, rejecting non-finite values.
    pub fn sample(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        nodes
            .iter()
            .map(|&k| {
                let v = self.eval(k);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Domain(format!("profile `{self}` is not finite at k = {k}")))
                }
            })
            .collect()
    }
}

impl fmt::Display for ProfileExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileExpr::Num(v) => write!(f, "{v}"),
            ProfileExpr::K => write!(f, "k"),
            ProfileExpr::Neg(a) => write!(f, "(-{a})"),
            ProfileExpr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            ProfileExpr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn parse_profile(text: &str) -> Result<ProfileExpr> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr()?;
    let (tok, off) = p.peek();
    if *tok != Tok::End {
        return Err(syntax(off, &["+", "-", "*", "/", "^", "end of input"]));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

const ATOM_START: &[&str] = &["number", "k", "identifier", "(", "-"];

fn syntax(offset: usize, expected: &[&str]) -> Error {
    Error::Syntax {
        offset,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let s = &text[start..i];
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push((Tok::Num(v), start)),
                _ => return Err(syntax(start, &["finite number"])),
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            if &text[start..i] == "gauss" && text[i..].starts_with("-bump") {
                i += "-bump".len();
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if b"+-*/^(),".contains(&c) {
            out.push((Tok::Sym(c as char), i));
            i += 1;
        } else {
            return Err(syntax(i, ATOM_START));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> (&Tok, usize) {
        let (t, o) = &self.tokens[self.pos];
        (t, *o)
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek().0 == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.peek().1, &[&c.to_string()]))
        }
    }

    fn expr(&mut self) -> Result<ProfileExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = ProfileExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<ProfileExpr> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = ProfileExpr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<ProfileExpr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.atom()?;
            return Ok(ProfileExpr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ProfileExpr> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) => Ok(ProfileExpr::Num(v)),
            Tok::Sym('-') => Ok(ProfileExpr::Neg(Box::new(self.atom()?))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "k" => Ok(ProfileExpr::K),
            Tok::Ident(name) => {
                let func = Func::lookup(&name).ok_or(Error::UnknownIdentifier {
                    name: name.clone(),
                    offset: off,
                })?;
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                let close = self.peek().1;
                self.expect(')')?;
                if !func.arities().contains(&args.len()) {
                    let want: Vec<String> = func
                        .arities()
                        .iter()
                        .map(|n| format!("{n} argument(s) to {}", func.name()))
                        .collect();
                    return Err(Error::Syntax {
                        offset: close,
                        expected: want,
                    });
                }
                Ok(ProfileExpr::Call(func, args))
            }
            _ => Err(syntax(off, ATOM_START)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_examples() {
        let e = parse_profile("k^2 * exp(-k)").unwrap();
        assert!((e.eval(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let c = parse_profile("constant(1)").unwrap();
        for k in [0.1, 1.0, 33.0] {
            assert_eq!(c.eval(k), 1.0);
        }
        let g = parse_profile("gauss-bump(2, 1, 0.5)").unwrap();
        assert_eq!(g, parse_profile("gauss_bump(2, 1, 0.5)").unwrap());
        assert!((g.eval(1.0) - 2.0).abs() < 1e-15);
        assert!((parse_profile("power(3, 2)").unwrap().eval(2.0) - 12.0).abs() < 1e-15);
        assert!((parse_profile("1 - 2 - 3").unwrap().eval(0.0) + 4.0).abs() < 1e-15);
        assert!((parse_profile("2^3").unwrap().eval(0.0) - 8.0).abs() < 1e-15);
        assert!((parse_profile("1.5e1 / 3").unwrap().eval(0.0) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn unclosed_paren_reports_offset() {
        match parse_profile("1/(k").unwrap_err() {
            Error::Syntax { offset, expected } => {
                assert_eq!(offset, 4);
                assert_eq!(expected, vec![")".to_string()]);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse_profile("2 * cosh(k)"),
            Err(Error::UnknownIdentifier { offset: 4, .. })
        ));
        assert!(matches!(parse_profile("k k"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_profile(""), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_profile("exp(1, 2)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_profile("1e999"), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_profile("k $ 2"), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn presets_round_trip_and_are_finite() {
        for text in [
            "constant(0.3)",
            "power(1)",
            "power(-2.5, 2)",
            "gauss_bump(1, 3, 0.7)",
            "k^2 * exp(-k)",
            "-1",
            "0.3 * k",
        ] {
            let e = parse_profile(text).unwrap();
            let again = parse_profile(&e.to_string()).unwrap();
            assert_eq!(e, again, "{text}");
            for i in 1..=400 {
                assert!(e.eval(i as f64 * 0.1).is_finite());
            }
        }
    }
}
