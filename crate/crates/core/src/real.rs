//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! Every [`Interval`] is guaranteed to contain the exact real it stands for:
//! lower endpoints are always rounded toward −∞ and upper endpoints toward
//! +∞. Precision is a mantissa width in bits and only controls how tight the
//! enclosure is, never whether it is correct. Predicates that cannot be
//! decided at the current width return `None`; callers retry at a higher
//! precision.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Bits of slack kept by internal series evaluations.
const GUARD_BITS: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
}

/// `man · 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            man: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        Dyadic { man, exp }.normalized()
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// Nearest double to `x`'s binary expansion (exact for doubles).
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite value");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let e = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if e == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), e - 1075)
        };
        Dyadic::new(BigInt::from(m) * sign, e)
    }

    fn normalized(mut self) -> Self {
        if self.man.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz as usize;
            self.exp += tz as i64;
        }
        self
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.man
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.man.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Position of the most significant bit: `|x| ∈ [2^(m-1), 2^m)`.
    pub fn magnitude(&self) -> i64 {
        self.exp + self.bits() as i64
    }

    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = (bits - prec as u64) as usize;
        let man = match dir {
            Round::Down => &self.man >> shift,
            Round::Up => -((-&self.man) >> shift),
        };
        Dyadic::new(man, self.exp + shift as i64)
    }

    fn align(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        (
            &self.man << (self.exp - e) as usize,
            &other.man << (other.exp - e) as usize,
            e,
        )
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.align(other);
        Dyadic::new(a + b, e)
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            man: -&self.man,
            exp: self.exp,
        }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_pow2(&self, k: i64) -> Dyadic {
        Dyadic {
            man: self.man.clone(),
            exp: self.exp + k,
        }
        .normalized()
    }

    pub fn div(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = prec as i64 + 2 + other.bits() as i64 - self.bits() as i64;
        let s = want.max(0);
        let num = &self.man << s as usize;
        let q = match dir {
            Round::Down => num.div_floor(&other.man),
            Round::Up => -((-num).div_floor(&other.man)),
        };
        Dyadic::new(q, self.exp - other.exp - s).round(prec, dir)
    }

    /// Square root of a non-negative value, rounded in direction `dir`.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Dyadic {
        assert!(self.signum() >= 0, "sqrt of negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut s = (2 * prec as i64 + 4 - self.bits() as i64).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = &self.man << s as usize;
        let mut r = m.sqrt();
        if dir == Round::Up && &r * &r < m {
            r += 1;
        }
        Dyadic::new(r, (self.exp - s) / 2).round(prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as usize
        } else {
            &self.man >> (-self.exp) as usize
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.man >> shift as usize).to_f64().unwrap_or(0.0);
        let e = self.exp + shift;
        if e > 2000 {
            return top.signum() * f64::INFINITY;
        }
        if e < -2200 {
            return 0.0;
        }
        top * 2f64.powi(e as i32)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    pub fn lesser<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn greater<'a>(&'a self, other: &'a Dyadic) -> &'a Dyadic {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }
}

/// Rational `num/den` rounded in direction `dir` to `prec` bits.
pub fn rational_to_dyadic(r: &BigRational, prec: u32, dir: Round) -> Dyadic {
    Dyadic::from_int(r.numer().clone()).div(&Dyadic::from_int(r.denom().clone()), prec, dir)
}

pub fn bigint_to_f64(x: &BigInt) -> f64 {
    Dyadic::from_int(x.clone()).to_f64()
}

/// A closed interval `[lo, hi]` with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        debug_assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, prec }
    }

    pub fn point(x: Dyadic, prec: u32) -> Self {
        Interval {
            lo: x.clone(),
            hi: x,
            prec,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Interval::point(Dyadic::zero(), prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        let d = Dyadic::from_int(n.into());
        Interval::from_endpoints(d.clone(), d, prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        Interval {
            lo: rational_to_dyadic(r, prec, Round::Down),
            hi: rational_to_dyadic(r, prec, Round::Up),
            prec,
        }
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Interval::point(Dyadic::from_f64(x), prec.max(53))
    }

    fn from_endpoints(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
            prec,
        }
    }

    pub fn lower(&self) -> &Dyadic {
        &self.lo
    }

    pub fn upper(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Interval {
        Interval::from_endpoints(self.lo.clone(), self.hi.clone(), prec)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn radius(&self) -> Dyadic {
        self.hi.sub(&self.lo).mul_pow2(-1)
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    fn p(&self, other: &Interval) -> u32 {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval::from_endpoints(self.lo.add(&other.lo), self.hi.add(&other.hi), self.p(other))
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval::from_endpoints(self.lo.sub(&other.hi), self.hi.sub(&other.lo), self.p(other))
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let prods = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = prods.iter().min().unwrap().clone();
        let hi = prods.iter().max().unwrap().clone();
        Interval::from_endpoints(lo, hi, self.p(other))
    }

    pub fn mul_int(&self, n: &BigInt) -> Interval {
        self.mul(&Interval::from_int(n.clone(), self.prec))
    }

    pub fn mul_pow2(&self, k: i64) -> Interval {
        Interval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
            prec: self.prec,
        }
    }

    pub fn square(&self) -> Interval {
        let a = self.lo.mul(&self.lo);
        let b = self.hi.mul(&self.hi);
        let hi = a.greater(&b).clone();
        let lo = if self.contains_zero() {
            Dyadic::zero()
        } else {
            a.lesser(&b).clone()
        };
        Interval::from_endpoints(lo, hi, self.prec)
    }

    /// Quotient; `None` if the divisor interval contains zero.
    pub fn div(&self, other: &Interval) -> Option<Interval> {
        if other.contains_zero() {
            return None;
        }
        let p = self.p(other);
        let cands_lo = [
            self.lo.div(&other.lo, p, Round::Down),
            self.lo.div(&other.hi, p, Round::Down),
            self.hi.div(&other.lo, p, Round::Down),
            self.hi.div(&other.hi, p, Round::Down),
        ];
        let cands_hi = [
            self.lo.div(&other.lo, p, Round::Up),
            self.lo.div(&other.hi, p, Round::Up),
            self.hi.div(&other.lo, p, Round::Up),
            self.hi.div(&other.hi, p, Round::Up),
        ];
        Some(Interval {
            lo: cands_lo.iter().min().unwrap().clone(),
            hi: cands_hi.iter().max().unwrap().clone(),
            prec: p,
        })
    }

    /// Square root, with negative parts of the interval clamped to zero.
    pub fn sqrt(&self) -> Interval {
        let lo = if self.lo.signum() <= 0 {
            Dyadic::zero()
        } else {
            self.lo.sqrt(self.prec, Round::Down)
        };
        let hi = if self.hi.signum() <= 0 {
            Dyadic::zero()
        } else {
            self.hi.sqrt(self.prec, Round::Up)
        };
        Interval {
            lo,
            hi,
            prec: self.prec,
        }
    }

    /// Convex hull of two intervals.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.lesser(&other.lo).clone(),
            hi: self.hi.greater(&other.hi).clone(),
            prec: self.p(other),
        }
    }

    /// Widens both endpoints by `r ≥ 0`.
    pub fn widen(&self, r: &Dyadic) -> Interval {
        Interval::from_endpoints(self.lo.sub(r), self.hi.add(r), self.prec)
    }

    /// `Some(true)` if certainly `self ≥ other`, `Some(false)` if certainly
    /// `self < other`, `None` if the enclosures overlap.
    pub fn ge(&self, other: &Interval) -> Option<bool> {
        if self.lo >= other.hi {
            Some(true)
        } else if self.hi < other.lo {
            Some(false)
        } else {
            None
        }
    }

    pub fn le(&self, other: &Interval) -> Option<bool> {
        other.ge(self)
    }

    /// `π` enclosed at the requested precision.
    pub fn pi(prec: u32) -> Interval {
        // Machin: π = 16·atan(1/5) − 4·atan(1/239)
        let wp = prec + GUARD_BITS;
        let a = atan_inv(5, wp);
        let b = atan_inv(239, wp);
        a.mul_int(&BigInt::from(16))
            .sub(&b.mul_int(&BigInt::from(4)))
            .with_prec(prec)
    }

    /// Simultaneous enclosures of `sin(x)` and `cos(x)`.
    pub fn sin_cos(&self) -> (Interval, Interval) {
        let prec = self.prec;
        let wp = prec + GUARD_BITS + self.mid().magnitude().max(0) as u32;
        let m = self.mid();
        let rad = self.radius();

        // Reduce the midpoint into roughly [−π, π].
        let two_pi = Interval::pi(wp).mul_pow2(1);
        let q = m.div(two_pi.lower(), 64.max(m.magnitude().max(0) as u32 + 8), Round::Down);
        let j = q.add(&Dyadic::new(BigInt::one(), -1)).floor();
        let y = Interval::point(m.clone(), wp).sub(&two_pi.mul_int(&j));

        let (s, c) = if y.is_point() && y.lower().is_zero() {
            (Interval::zero(wp), Interval::from_int(1, wp))
        } else {
            taylor_sin_cos(&y, wp)
        };
        let one = Dyadic::from_int(1);
        let clamp = |i: Interval| -> Interval {
            let w = i.widen(&rad);
            let lo = w.lo.greater(&one.neg()).clone();
            let hi = w.hi.lesser(&one).clone();
            Interval::from_endpoints(lo, hi, prec)
        };
        (clamp(s), clamp(c))
    }

    pub fn sin(&self) -> Interval {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Interval {
        self.sin_cos().1
    }

    /// Upper endpoint as a decimal string with `digits` significant digits,
    /// rounded upward so the string is itself an upper bound.
    pub fn upper_decimal(&self, digits: usize) -> String {
        dyadic_to_decimal(&self.hi, digits, Round::Up)
    }

    pub fn lower_decimal(&self, digits: usize) -> String {
        dyadic_to_decimal(&self.lo, digits, Round::Down)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            dyadic_to_decimal(&self.lo, 20, Round::Down),
            dyadic_to_decimal(&self.hi, 20, Round::Up)
        )
    }
}

/// `atan(1/m)` for an integer `m ≥ 2` via its alternating series.
fn atan_inv(m: u64, prec: u32) -> Interval {
    let m = BigInt::from(m);
    let m2 = &m * &m;
    let mut sum = Interval::zero(prec);
    let mut pow = m.clone(); // m^(2n+1)
    let tiny = Dyadic::new(BigInt::one(), -(prec as i64) - 4);
    let mut n: u64 = 0;
    loop {
        let den = &pow * BigInt::from(2 * n + 1);
        let term = Interval::from_rational(&BigRational::new(BigInt::one(), den), prec);
        if term.upper() < &tiny {
            // Alternating with decreasing terms: the tail is bounded by this term.
            return sum.widen(term.upper());
        }
        sum = if n.is_multiple_of(2) { sum.add(&term) } else { sum.sub(&term) };
        pow *= &m2;
        n += 1;
    }
}

fn taylor_sin_cos(y: &Interval, prec: u32) -> (Interval, Interval) {
    let y_abs = y.lower().neg().greater(y.upper()).clone();
    let tiny = Dyadic::new(BigInt::one(), -(prec as i64) - 4);
    let y2 = y.square();
    let mut term = y.clone(); // y^n / n! for odd n, starting n = 1
    let mut sin = Interval::zero(prec);
    let mut cos = Interval::from_int(1, prec);
    let mut cterm = Interval::from_int(1, prec); // y^n / n! for even n
    let mut n: u64 = 1;
    let mut sign_s = true;
    loop {
        sin = if sign_s { sin.add(&term) } else { sin.sub(&term) };
        // cos term of index n+1
        let next_c = cterm
            .mul(&y2)
            .div(&Interval::from_int(BigInt::from(n * (n + 1)), prec))
            .unwrap();
        cos = if sign_s { cos.sub(&next_c) } else { cos.add(&next_c) };
        cterm = next_c;
        let next_s = term
            .mul(&y2)
            .div(&Interval::from_int(BigInt::from((n + 1) * (n + 2)), prec))
            .unwrap();
        term = next_s;
        n += 2;
        sign_s = !sign_s;
        // Once n exceeds |y| the terms decrease, so the magnitude of the next
        // term bounds the remainder of both alternating series.
        let bound = term.upper().greater(&term.lower().neg()).clone();
        let cbound = cterm
            .mul(&y2)
            .div(&Interval::from_int(BigInt::from(n * (n + 1)), prec))
            .unwrap();
        let cbound = cbound.upper().greater(&cbound.lower().neg()).clone();
        if Dyadic::from_int(n as i64) > y_abs.mul_pow2(1) && bound < tiny && cbound < tiny {
            return (sin.widen(&bound), cos.widen(&cbound));
        }
    }
}

/// Decimal rendering with `digits` significant digits, rounded in `dir`.
pub fn dyadic_to_decimal(x: &Dyadic, digits: usize, dir: Round) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let r = x.to_rational();
    let neg = r.is_negative();
    let a = r.abs();
    // Magnitude guess, corrected below.
    let approx = x.to_f64().abs();
    let mut e10: i64 = if approx.is_finite() && approx > 0.0 {
        approx.log10().floor() as i64
    } else {
        (x.magnitude() as f64 * std::f64::consts::LOG10_2).floor() as i64
    };
    let ten = BigInt::from(10);
    let pow10 = |e: i64| -> BigRational {
        if e >= 0 {
            BigRational::from_integer(num_traits::pow(ten.clone(), e as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(ten.clone(), (-e) as usize))
        }
    };
    loop {
        let lower = pow10(e10);
        if a < lower {
            e10 -= 1;
            continue;
        }
        if a >= pow10(e10 + 1) {
            e10 += 1;
            continue;
        }
        break;
    }
    // Round the magnitude away from or toward zero depending on sign and direction.
    let away = (dir == Round::Up) != neg;
    let scaled = &a * pow10(digits as i64 - 1 - e10);
    let mut m = if away {
        scaled.ceil().to_integer()
    } else {
        scaled.floor().to_integer()
    };
    let mut e = e10;
    if m >= num_traits::pow(ten.clone(), digits) {
        m /= &ten;
        e += 1;
    }
    let mut s = m.to_string();
    while s.len() > 1 && s.ends_with('0') {
        s.pop();
    }
    let (head, tail) = s.split_at(1);
    let mant = if tail.is_empty() {
        head.to_string()
    } else {
        format!("{head}.{tail}")
    };
    let sign = if neg { "-" } else { "" };
    if e == 0 {
        format!("{sign}{mant}")
    } else {
        format!("{sign}{mant}e{e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifting_negative_mantissa_rounds_down() {
        let d = Dyadic::new(BigInt::from(-5), 0).round(2, Round::Down);
        assert_eq!(d.to_f64(), -6.0);
        let u = Dyadic::new(BigInt::from(-5), 0).round(2, Round::Up);
        assert_eq!(u.to_f64(), -4.0);
    }

    #[test]
    fn pi_encloses_reference_digits() {
        let pi = Interval::pi(256);
        let reference: BigRational = "314159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798/100000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000"
            .parse()
            .unwrap();
        // Reference is a truncation, accurate to 1e-101.
        let r_hi = &reference + BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 101));
        assert!(pi.lower().to_rational() <= r_hi);
        assert!(pi.upper().to_rational() >= reference);
        assert!(pi.width() < Dyadic::new(BigInt::one(), -240));
    }

    #[test]
    fn sin_cos_match_f64() {
        for &x in &[0.0, 0.5, -1.25, 3.0, 7.5, -20.0, 1e3] {
            let (s, c) = Interval::from_f64(x, 128).sin_cos();
            assert!((s.to_f64() - x.sin()).abs() < 1e-12, "sin {x}");
            assert!((c.to_f64() - x.cos()).abs() < 1e-12, "cos {x}");
            assert!(s.width() < Dyadic::new(BigInt::one(), -100));
        }
    }

    #[test]
    fn pythagorean_identity_enclosed() {
        let (s, c) = Interval::from_f64(0.7, 200).sin_cos();
        let one = s.square().add(&c.square());
        assert!(one.contains(&Dyadic::from_int(1)));
    }

    #[test]
    fn sqrt_brackets() {
        let two = Interval::from_int(2, 128);
        let r = two.sqrt();
        assert!(r.square().contains(&Dyadic::from_int(2)));
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn decimal_rendering() {
        let x = Dyadic::from_f64(0.1);
        assert_eq!(dyadic_to_decimal(&x, 5, Round::Up), "1.0001e-1");
        assert_eq!(dyadic_to_decimal(&x, 5, Round::Down), "1e-1");
        assert_eq!(dyadic_to_decimal(&Dyadic::from_int(-250), 3, Round::Down), "-2.5e2");
        assert_eq!(dyadic_to_decimal(&Dyadic::from_int(1), 3, Round::Up), "1");
    }

    #[test]
    fn division_is_directed() {
        let one = Interval::from_int(1, 64);
        let three = Interval::from_int(3, 64);
        let q = one.div(&three).unwrap();
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        assert!(q.lower().to_rational() < third && q.upper().to_rational() > third);
    }
}
