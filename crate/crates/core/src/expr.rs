//! Scalar field expressions of `(x, y)`.
//!
//! Carrying-capacity landscapes and initial conditions are given in the
//! config file as text such as
//! `2*exp(-5*((x+.75)^2+(y-.75)^2))`. This module parses them with a small
//! recursive-descent parser and evaluates the resulting tree in `f64`.
//!
//! Precedence, tightest first: `^` (exponent must be a numeric literal),
//! unary `-`, `* /`, `+ -`. Binary operators are left-associative, so
//! `-x^2` is `-(x^2)` and `1-x^2` at `x = 2` is `-3`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function `{name}` at byte {offset} takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        offset: usize,
        expected: usize,
        found: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainErrorKind {
    DivisionByZero,
    SqrtOfNegative,
    FractionalPowerOfNegative,
}

impl fmt::Display for DomainErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainErrorKind::DivisionByZero => "division by zero",
            DomainErrorKind::SqrtOfNegative => "sqrt of negative value",
            DomainErrorKind::FractionalPowerOfNegative => "fractional power of negative value",
        })
    }
}

/// Evaluation failed; `subexpr` is the printed form of the offending node.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{kind} in `{subexpr}` at (x, y) = ({x}, {y})")]
pub struct EvalError {
    pub kind: DomainErrorKind,
    pub subexpr: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Parsed expression tree. Immutable once built, so `&Expr` can be shared
/// across threads freely.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ParseError> {
        parse(text)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        let fail = |kind, node: &Expr| EvalError {
            kind,
            subexpr: node.to_string(),
            x,
            y,
        };
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Binary(op, l, r) => {
                let a = l.eval(x, y)?;
                let b = r.eval(x, y)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(fail(DomainErrorKind::DivisionByZero, self));
                        }
                        a / b
                    }
                }
            }
            Expr::Pow(base, p) => {
                let b = base.eval(x, y)?;
                if b < 0.0 && p.fract() != 0.0 {
                    return Err(fail(DomainErrorKind::FractionalPowerOfNegative, self));
                }
                if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
                    b.powi(*p as i32)
                } else {
                    b.powf(*p)
                }
            }
            Expr::Call(f, arg) => {
                let a = arg.eval(x, y)?;
                match f {
                    Func::Exp => a.exp(),
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(fail(DomainErrorKind::SqrtOfNegative, self));
                        }
                        a.sqrt()
                    }
                }
            }
        })
    }

    /// Evaluates at every point, stopping at the first domain error.
    pub fn sample(&self, points: &[[f64; 2]]) -> Result<Vec<f64>, EvalError> {
        points.iter().map(|p| self.eval(p[0], p[1])).collect()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => {
                write!(f, "(-{})", -v)
            }
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(Var::X) => f.write_str("x"),
            Expr::Var(Var::Y) => f.write_str("y"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Pow(b, p) => write!(f, "({b}^{p})"),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
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
    Comma,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(v) => format!("number {v}"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::End => "end of input".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, start));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
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
            let lit = &text[start..i];
            let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{ch}`"),
        });
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("expected {wanted}, found {}", describe(self.peek())),
        }
    }

    fn expect(&mut self, t: Tok, wanted: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let mut base = self.primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let negative = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                (Tok::Num(v), _) => {
                    base = Expr::Pow(Box::new(base), if negative { -v } else { v });
                }
                (t, offset) => {
                    return Err(ParseError::Syntax {
                        offset,
                        message: format!("exponent must be a numeric literal, found {}", describe(&t)),
                    })
                }
            }
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.sum()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                let func = Func::from_name(&name);
                let is_call = *self.peek() == Tok::LParen;
                match (name.as_str(), func, is_call) {
                    ("x", _, false) => Ok(Expr::Var(Var::X)),
                    ("y", _, false) => Ok(Expr::Var(Var::Y)),
                    (_, Some(f), true) => {
                        self.bump();
                        let mut args = Vec::new();
                        if *self.peek() != Tok::RParen {
                            args.push(self.sum()?);
                            while *self.peek() == Tok::Comma {
                                self.bump();
                                args.push(self.sum()?);
                            }
                        }
                        self.expect(Tok::RParen, "`)` closing the argument list")?;
                        if args.len() != 1 {
                            return Err(ParseError::Arity {
                                name,
                                offset,
                                expected: 1,
                                found: args.len(),
                            });
                        }
                        Ok(Expr::Call(f, Box::new(args.pop().unwrap())))
                    }
                    (_, Some(_), false) => Err(ParseError::Syntax {
                        offset: self.offset(),
                        message: format!("expected `(` after function `{name}`"),
                    }),
                    _ => Err(ParseError::UnknownIdentifier { name, offset }),
                }
            }
            _ => Err(self.unexpected("a number, variable, function call or `(`")),
        }
    }
}

/// Parses `text` into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    if let Some(pos) = text.bytes().position(|b| !b.is_ascii()) {
        return Err(ParseError::Syntax {
            offset: pos,
            message: "non-ASCII input".into(),
        });
    }
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}
