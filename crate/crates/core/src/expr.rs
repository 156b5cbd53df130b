//! A small closed expression language for initial data.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 'y' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp' | 'sqrt'
//! ```
//!
//! `×` and `−` are accepted as spellings of `*` and `-`. `^` is right-associative.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::Point;
use crate::problem::Generator;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    X,
    Y,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval<T: Real>(&self, x: T, y: T) -> T {
        match self {
            Node::Num(v) => T::lit(*v),
            Node::X => x,
            Node::Y => y,
            Node::Neg(a) => -a.eval(x, y),
            Node::Add(a, b) => a.eval(x, y) + b.eval(x, y),
            Node::Sub(a, b) => a.eval(x, y) - b.eval(x, y),
            Node::Mul(a, b) => a.eval(x, y) * b.eval(x, y),
            Node::Div(a, b) => a.eval(x, y) / b.eval(x, y),
            Node::Pow(a, b) => {
                let base = a.eval(x, y);
                match **b {
                    // integer exponents keep negative bases real
                    Node::Num(n) if n.fract() == 0.0 && n.abs() <= 64.0 => base.powi(n as i32),
                    _ => base.powf(b.eval(x, y)),
                }
            }
            Node::Call(f, a) => {
                let v = a.eval(x, y);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt(),
                }
            }
        }
    }

    fn uses_y(&self) -> bool {
        match self {
            Node::Y => true,
            Node::Num(_) | Node::X => false,
            Node::Neg(a) | Node::Call(_, a) => a.uses_y(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => a.uses_y() || b.uses_y(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = src.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '×' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((i, t));
            it.next();
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let mut end = i;
            let mut prev = ' ';
            while let Some(&(j, d)) = it.peek() {
                let exp_sign = (d == '+' || d == '-') && (prev == 'e' || prev == 'E');
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    end = j + d.len_utf8();
                    prev = d;
                    it.next();
                } else {
                    break;
                }
            }
            let text = &src[i..end];
            let v: f64 = text
                .parse()
                .map_err(|_| Error::Expression { offset: i, message: format!("malformed number '{text}'") })?;
            out.push((i, Tok::Num(v)));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut end = i;
            while let Some(&(j, d)) = it.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    end = j + 1;
                    it.next();
                } else {
                    break;
                }
            }
            out.push((i, Tok::Ident(src[i..end].to_string())));
            continue;
        }
        return Err(Error::Expression { offset: i, message: format!("unexpected character '{c}'") });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |t| t.0)
    }

    fn err<V>(&self, message: impl Into<String>) -> Result<V> {
        Err(Error::Expression { offset: self.offset(), message: message.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect_close()?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "x" => return Ok(Node::X),
                    "y" => return Ok(Node::Y),
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "e" => return Ok(Node::Num(std::f64::consts::E)),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    _ => return Err(Error::Expression { offset: at, message: format!("unknown identifier '{name}'") }),
                };
                if self.bump() != Some(Tok::LParen) {
                    return Err(Error::Expression { offset: at, message: format!("'{name}' must be followed by '('") });
                }
                let arg = self.expr()?;
                self.expect_close()?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            Some(t) => Err(Error::Expression { offset: at, message: format!("unexpected token {t:?}") }),
            None => Err(Error::Expression { offset: at, message: "unexpected end of expression".into() }),
        }
    }

    fn expect_close(&mut self) -> Result<()> {
        if self.peek() == Some(&Tok::RParen) {
            self.bump();
            Ok(())
        } else {
            self.err("expected ')'")
        }
    }
}

/// A parsed expression in `x` and `y`, keeping its source text.
#[derive(Clone, Debug)]
pub struct Expression {
    source: String,
    root: Arc<Node>,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let toks = lex(source)?;
        let mut p = Parser { toks, pos: 0, len: source.len() };
        let root = p.expr()?;
        if p.pos < p.toks.len() {
            return p.err("trailing input");
        }
        Ok(Self { source: source.to_string(), root: Arc::new(root) })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn uses_y(&self) -> bool {
        self.root.uses_y()
    }

    pub fn eval<T: Real>(&self, p: Point<T>) -> T {
        self.root.eval(p[0], p[1])
    }

    pub fn generator<T: Real>(&self) -> Generator<T> {
        let root = self.root.clone();
        Arc::new(move |p: Point<T>| root.eval(p[0], p[1]))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for Expression {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expression {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}
