//! Angle and precision expressions: decimals, `pi`, `+ - * /`, unary minus
//! and parentheses.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::Interval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Num(BigRational),
    Pi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn rational(r: BigRational) -> Expr {
        Expr::Num(r)
    }

    /// Enclosure of the value at `prec` bits.
    pub fn eval(&self, prec: u32) -> Result<Interval> {
        Ok(match self {
            Expr::Num(r) => Interval::from_rational(r, prec),
            Expr::Pi => Interval::pi(prec),
            Expr::Neg(x) => x.eval(prec)?.neg(),
            Expr::Add(x, y) => x.eval(prec)?.add(&y.eval(prec)?),
            Expr::Sub(x, y) => x.eval(prec)?.sub(&y.eval(prec)?),
            Expr::Mul(x, y) => x.eval(prec)?.mul(&y.eval(prec)?),
            Expr::Div(x, y) => x
                .eval(prec)?
                .div(&y.eval(prec)?)
                .ok_or_else(|| Error::InvalidArgument("division by zero".into()))?,
        })
    }

    /// The value as `a + b·π` with rational `a, b`, when it has that shape.
    pub fn as_linear_in_pi(&self) -> Option<(BigRational, BigRational)> {
        let zero = BigRational::zero;
        match self {
            Expr::Num(r) => Some((r.clone(), zero())),
            Expr::Pi => Some((zero(), BigRational::one())),
            Expr::Neg(x) => x.as_linear_in_pi().map(|(a, b)| (-a, -b)),
            Expr::Add(x, y) => {
                let (a, b) = x.as_linear_in_pi()?;
                let (c, d) = y.as_linear_in_pi()?;
                Some((a + c, b + d))
            }
            Expr::Sub(x, y) => {
                let (a, b) = x.as_linear_in_pi()?;
                let (c, d) = y.as_linear_in_pi()?;
                Some((a - c, b - d))
            }
            Expr::Mul(x, y) => {
                let (a, b) = x.as_linear_in_pi()?;
                let (c, d) = y.as_linear_in_pi()?;
                if b.is_zero() {
                    Some((&a * &c, &a * &d))
                } else if d.is_zero() {
                    Some((&a * &c, &b * &c))
                } else {
                    None
                }
            }
            Expr::Div(x, y) => {
                let (a, b) = x.as_linear_in_pi()?;
                let (c, d) = y.as_linear_in_pi()?;
                if d.is_zero() && !c.is_zero() {
                    Some((a / &c, b / &c))
                } else {
                    None
                }
            }
        }
    }

    /// The exact rational value, if the expression does not involve `π`.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.as_linear_in_pi()? {
            (a, b) if b.is_zero() => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Expr::Num(r) => write!(f, "({}/{})", r.numer(), r.denom()),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(x) => write!(f, "-{x}"),
            Expr::Add(x, y) => write!(f, "({x} + {y})"),
            Expr::Sub(x, y) => write!(f, "({x} - {y})"),
            Expr::Mul(x, y) => write!(f, "{x} * {y}"),
            Expr::Div(x, y) => write!(f, "{x} / {y}"),
        }
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr> {
        let mut p = Parser { src: s.as_bytes(), pos: 0 };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "{msg} at offset {} in `{}`",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
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

    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    e = Expr::Add(Box::new(e), Box::new(self.product()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    e = Expr::Sub(Box::new(e), Box::new(self.product()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    if rhs.as_rational().is_some_and(|r| r.is_zero()) {
                        return Err(self.error("division by zero"));
                    }
                    e = Expr::Div(Box::new(e), Box::new(rhs));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"pi" | b"PI" | b"Pi" => Ok(Expr::Pi),
                    _ => {
                        self.pos = start;
                        Err(self.error("unknown identifier"))
                    }
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            _ => Err(self.error("expected a number, `pi` or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let int_digits = digits(self);
        let mut frac_digits = 0;
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac_digits = digits(self);
        }
        if int_digits + frac_digits == 0 {
            return Err(self.error("malformed number"));
        }
        let mantissa_end = self.pos;
        let mut exponent: i64 = 0;
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            self.pos += 1;
            let neg = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let es = self.pos;
            if digits(self) == 0 {
                return Err(self.error("malformed exponent"));
            }
            let text = std::str::from_utf8(&self.src[es..self.pos]).expect("ascii digits");
            exponent = text
                .parse::<i64>()
                .ok()
                .filter(|e| *e <= 100_000)
                .ok_or_else(|| self.error("exponent out of range"))?;
            if neg {
                exponent = -exponent;
            }
        }
        let text: String = std::str::from_utf8(&self.src[start..mantissa_end])
            .expect("ascii")
            .chars()
            .filter(|c| *c != '.')
            .collect();
        let mantissa: BigInt = text.parse().map_err(|_| self.error("malformed number"))?;
        let scale = exponent - frac_digits as i64;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
        };
        Ok(Expr::Num(value))
    }
}

/// Parses a strictly positive rational precision such as `1e-10` or `0.001`.
pub fn parse_epsilon(s: &str) -> Result<BigRational> {
    let e: Expr = s.parse()?;
    let r = e
        .as_rational()
        .ok_or_else(|| Error::InvalidArgument(format!("epsilon `{s}` must be rational")))?;
    if !r.is_positive() {
        return Err(Error::InvalidArgument(format!("epsilon `{s}` must be positive")));
    }
    Ok(r)
}
