//! Expression trees for defining functions.
//!
//! The language covers polynomials in `re(zk)`, `im(zk)`, `abs2(zk)` (= |z_k|²)
//! and the real coordinates `x1 … x2n`, closed under `+ - *`, division by
//! constants, integer powers `^k` and `exp(·)`. Indices in the text are 1-based;
//! `zk = x(2k-1) + i·x(2k)`.

use std::fmt;

use crate::dual::Jet2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Re z_k, 0-based complex index.
    Re(usize),
    /// Im z_k, 0-based complex index.
    Im(usize),
    /// |z_k|², 0-based complex index.
    AbsSq(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Powi(Box<Expr>, i32),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }
    pub fn re(k: usize) -> Expr {
        Expr::Re(k)
    }
    pub fn im(k: usize) -> Expr {
        Expr::Im(k)
    }
    pub fn abs2(k: usize) -> Expr {
        Expr::AbsSq(k)
    }
    pub fn powi(self, k: i32) -> Expr {
        Expr::Powi(Box::new(self), k)
    }
    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    /// Sum of a non-empty list of terms.
    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        terms
            .into_iter()
            .reduce(|a, b| a + b)
            .unwrap_or(Expr::Const(0.0))
    }

    /// Largest 0-based complex index referenced, if any.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Re(k) | Expr::Im(k) | Expr::AbsSq(k) => Some(*k),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                match (a.max_index(), b.max_index()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Expr::Neg(a) | Expr::Powi(a, _) | Expr::Exp(a) => a.max_index(),
        }
    }

    /// Plain evaluation at a real point `x` of length 2n.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Re(k) => x[2 * k],
            Expr::Im(k) => x[2 * k + 1],
            Expr::AbsSq(k) => x[2 * k] * x[2 * k] + x[2 * k + 1] * x[2 * k + 1],
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Neg(a) => -a.eval(x),
            Expr::Powi(a, k) => a.eval(x).powi(*k),
            Expr::Exp(a) => a.eval(x).exp(),
        }
    }

    /// Value, gradient and Hessian at `x` by second-order dual propagation.
    pub fn eval_jet(&self, x: &[f64]) -> Jet2 {
        let m = x.len();
        match self {
            Expr::Const(v) => Jet2::constant(*v, m),
            Expr::Re(k) => Jet2::variable(x[2 * k], 2 * k, m),
            Expr::Im(k) => Jet2::variable(x[2 * k + 1], 2 * k + 1, m),
            Expr::AbsSq(k) => {
                let (a, b) = (2 * k, 2 * k + 1);
                let mut j = Jet2::constant(x[a] * x[a] + x[b] * x[b], m);
                j.grad[a] = 2.0 * x[a];
                j.grad[b] = 2.0 * x[b];
                j.hess[a * m + a] = 2.0;
                j.hess[b * m + b] = 2.0;
                j
            }
            Expr::Add(a, b) => &a.eval_jet(x) + &b.eval_jet(x),
            Expr::Sub(a, b) => &a.eval_jet(x) - &b.eval_jet(x),
            Expr::Mul(a, b) => {
                // constant factors are common in catalog entries; skip the full product
                if let Expr::Const(c) = **a {
                    return b.eval_jet(x).scale(c);
                }
                if let Expr::Const(c) = **b {
                    return a.eval_jet(x).scale(c);
                }
                &a.eval_jet(x) * &b.eval_jet(x)
            }
            Expr::Neg(a) => -&a.eval_jet(x),
            Expr::Powi(a, k) => a.eval_jet(x).powi(*k),
            Expr::Exp(a) => a.eval_jet(x).exp(),
        }
    }

    /// Parse the textual form. `n` bounds the admissible complex indices.
    pub fn parse(src: &str, n: usize) -> Result<Expr> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            n,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    fn is_constant(&self) -> bool {
        self.max_index().is_none()
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $var:ident) => {
        impl std::ops::$tr for Expr {
            type Output = Expr;
            fn $f(self, rhs: Expr) -> Expr {
                Expr::$var(Box::new(self), Box::new(rhs))
            }
        }
    };
}
binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) if *v < 0.0 => write!(f, "({v:?})"),
            Expr::Const(v) => write!(f, "{v:?}"),
            Expr::Re(k) => write!(f, "re(z{})", k + 1),
            Expr::Im(k) => write!(f, "im(z{})", k + 1),
            Expr::AbsSq(k) => write!(f, "abs2(z{})", k + 1),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Powi(a, k) => write!(f, "({a}^{k})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs + self.term()?;
            } else if self.eat(b'-') {
                lhs = lhs - self.term()?;
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs * self.unary()?;
            } else if self.eat(b'/') {
                let at = self.pos;
                let rhs = self.unary()?;
                if !rhs.is_constant() {
                    self.pos = at;
                    return Err(self.err("division is only allowed by constants"));
                }
                let d = rhs.eval(&[]);
                if d == 0.0 {
                    self.pos = at;
                    return Err(self.err("division by zero"));
                }
                lhs = lhs * Expr::Const(1.0 / d);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = self.eat(b'-');
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("exponent must be an integer literal"));
            }
            let k: i32 = std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("exponent out of range"))?;
            return Ok(base.powi(if neg { -k } else { k }));
        }
        Ok(base)
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn index_of(&self, name: &str, prefix: char, limit: usize) -> Result<usize> {
        let idx: usize = name[1..]
            .parse()
            .map_err(|_| self.err(&format!("bad variable `{name}`")))?;
        if !name.starts_with(prefix) || idx == 0 || idx > limit {
            return Err(self.err(&format!(
                "variable `{name}` out of range (1..={limit})"
            )));
        }
        Ok(idx - 1)
    }

    fn complex_arg(&mut self) -> Result<usize> {
        self.expect(b'(')?;
        self.skip_ws();
        let name = self.ident();
        if !name.starts_with('z') || name.len() < 2 {
            return Err(self.err("expected a complex coordinate `zk`"));
        }
        let k = self.index_of(&name, 'z', self.n)?;
        self.expect(b')')?;
        Ok(k)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "re" => Ok(Expr::Re(self.complex_arg()?)),
                    "im" => Ok(Expr::Im(self.complex_arg()?)),
                    "abs2" => Ok(Expr::AbsSq(self.complex_arg()?)),
                    "exp" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(e.exp())
                    }
                    _ if name.starts_with('x') && name.len() > 1 => {
                        let i = self.index_of(&name, 'x', 2 * self.n)?;
                        Ok(if i % 2 == 0 {
                            Expr::Re(i / 2)
                        } else {
                            Expr::Im(i / 2)
                        })
                    }
                    _ => Err(self.err(&format!("unknown identifier `{name}`"))),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let exp_sign = (c == b'-' || c == b'+')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>().map(Expr::Const).map_err(|_| Error::Parse {
            offset: start,
            message: format!("bad number `{text}`"),
        })
    }
}
