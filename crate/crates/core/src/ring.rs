//! Exact arithmetic over the Gaussian integers and the scaled values
//! `α / (√5^k · √2^l)` that make up Clifford+V matrix entries.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Error;

/// An element `re + im·i` of `Z[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussianInteger {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussianInteger {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussianInteger {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn i() -> Self {
        Self::new(0, 1)
    }

    /// `i^n` for any integer `n`.
    pub fn unit(n: i64) -> Self {
        match n.rem_euclid(4) {
            0 => Self::new(1, 0),
            1 => Self::new(0, 1),
            2 => Self::new(-1, 0),
            _ => Self::new(0, -1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianInteger {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `re² + im²`, i.e. `α†α`.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        GaussianInteger {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        GaussianInteger {
            re: &self.re * s,
            im: &self.im * s,
        }
    }

    /// True when both components are divisible by the rational integer `d`.
    pub fn divisible_by(&self, d: &BigInt) -> bool {
        self.re.is_multiple_of(d) && self.im.is_multiple_of(d)
    }

    /// Exact division by a rational integer; caller guarantees divisibility.
    pub fn div_exact(&self, d: &BigInt) -> Self {
        debug_assert!(self.divisible_by(d));
        GaussianInteger {
            re: &self.re / d,
            im: &self.im / d,
        }
    }

    /// Quotient rounded to the nearest Gaussian integer, so that the
    /// remainder has norm at most half the divisor's.
    pub fn div_round(&self, other: &GaussianInteger) -> GaussianInteger {
        let n = other.norm();
        assert!(!n.is_zero(), "division by zero in Z[i]");
        let num = self * &other.conj();
        GaussianInteger {
            re: round_div(&num.re, &n),
            im: round_div(&num.im, &n),
        }
    }

    pub fn rem_round(&self, other: &GaussianInteger) -> GaussianInteger {
        let q = self.div_round(other);
        self - &(&q * other)
    }

    /// Euclidean gcd in `Z[i]` (defined up to a unit).
    pub fn gcd(&self, other: &GaussianInteger) -> GaussianInteger {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem_round(&b);
            a = b;
            b = r;
        }
        a
    }

    pub fn pow(&self, mut e: u32) -> GaussianInteger {
        let mut base = self.clone();
        let mut acc = GaussianInteger::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

fn round_div(a: &BigInt, n: &BigInt) -> BigInt {
    // floor((2a + n) / 2n)
    let two_a: BigInt = a << 1usize;
    let two_n: BigInt = n << 1usize;
    (two_a + n).div_floor(&two_n)
}

impl fmt::Display for GaussianInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl<'a> Add<&'a GaussianInteger> for &'a GaussianInteger {
    type Output = GaussianInteger;
    fn add(self, rhs: &GaussianInteger) -> GaussianInteger {
        GaussianInteger {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl<'a> Sub<&'a GaussianInteger> for &'a GaussianInteger {
    type Output = GaussianInteger;
    fn sub(self, rhs: &GaussianInteger) -> GaussianInteger {
        GaussianInteger {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl<'a> Mul<&'a GaussianInteger> for &'a GaussianInteger {
    type Output = GaussianInteger;
    fn mul(self, rhs: &GaussianInteger) -> GaussianInteger {
        GaussianInteger {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianInteger {
    type Output = GaussianInteger;
    fn neg(self) -> GaussianInteger {
        GaussianInteger {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GaussianInteger> for GaussianInteger {
            type Output = GaussianInteger;
            fn $m(self, rhs: GaussianInteger) -> GaussianInteger {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for GaussianInteger {
    type Output = GaussianInteger;
    fn neg(self) -> GaussianInteger {
        -&self
    }
}

/// Balanced residues of both components modulo 5, each in `[-2, 2]`.
pub fn residues_mod5(x: &GaussianInteger) -> (i8, i8) {
    (balanced_mod5(&x.re), balanced_mod5(&x.im))
}

pub(crate) fn balanced_mod5(x: &BigInt) -> i8 {
    let r = x.mod_floor(&BigInt::from(5));
    let r: i8 = if r.is_zero() {
        0
    } else {
        r.to_u32_digits().1[0] as i8
    };
    if r > 2 {
        r - 5
    } else {
        r
    }
}

/// Pair `(k, l)`: powers of `√5` and `√2` in a common denominator.
///
/// The derived ordering is lexicographic, `k` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DenominatorExponent {
    pub k: u32,
    pub l: u32,
}

impl DenominatorExponent {
    pub const fn new(k: u32, l: u32) -> Self {
        DenominatorExponent { k, l }
    }

    /// `5^k · 2^l`, the squared denominator.
    pub fn squared_denominator(&self) -> BigInt {
        num_traits::pow(BigInt::from(5), self.k as usize) << (self.l as usize)
    }

    pub fn is_public(&self) -> bool {
        self.l <= 2
    }
}

impl fmt::Display for DenominatorExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.k, self.l)
    }
}

/// A value `num / (√5^k · √2^l)`.
#[derive(Clone, Debug)]
pub struct ScaledGaussian {
    pub num: GaussianInteger,
    pub exp: DenominatorExponent,
}

impl ScaledGaussian {
    pub fn new(num: GaussianInteger, exp: DenominatorExponent) -> Self {
        ScaledGaussian { num, exp }
    }

    /// Builds a public value; fails if `l` stays above 2 after reduction.
    pub fn checked(num: GaussianInteger, exp: DenominatorExponent) -> Result<Self, Error> {
        let v = ScaledGaussian { num, exp }.reduce_to_least();
        if v.exp.is_public() {
            Ok(v)
        } else {
            Err(Error::InvariantViolation(format!(
                "irreducible √2 exponent {} in {}",
                v.exp.l, v.num
            )))
        }
    }

    pub fn is_least(&self) -> bool {
        let five = BigInt::from(5);
        let two = BigInt::from(2);
        (self.exp.k < 2 || !self.num.divisible_by(&five))
            && (self.exp.l < 2 || !self.num.divisible_by(&two))
    }

    pub fn reduce_to_least(&self) -> ScaledGaussian {
        let mut num = self.num.clone();
        let mut exp = self.exp;
        reduce_in_place(std::slice::from_mut(&mut num), &mut exp);
        ScaledGaussian { num, exp }
    }

    /// Rewrites the value over a larger denominator. Both exponent gaps must be even.
    pub fn rescale(&self, target: DenominatorExponent) -> Option<ScaledGaussian> {
        let dk = target.k.checked_sub(self.exp.k)?;
        let dl = target.l.checked_sub(self.exp.l)?;
        if dk % 2 != 0 || dl % 2 != 0 {
            return None;
        }
        let factor = num_traits::pow(BigInt::from(5), (dk / 2) as usize) << ((dl / 2) as usize);
        Some(ScaledGaussian {
            num: self.num.scale(&factor),
            exp: target,
        })
    }

    /// Approximate value as `(re, im)` doubles.
    pub fn to_f64(&self) -> (f64, f64) {
        let d = self.exp.squared_denominator();
        let s = crate::real::bigint_to_f64(&d).sqrt();
        (
            crate::real::bigint_to_f64(&self.num.re) / s,
            crate::real::bigint_to_f64(&self.num.im) / s,
        )
    }
}

impl PartialEq for ScaledGaussian {
    fn eq(&self, other: &Self) -> bool {
        let a = self.reduce_to_least();
        let b = other.reduce_to_least();
        a.exp == b.exp && a.num == b.num
    }
}

impl Eq for ScaledGaussian {}

impl fmt::Display for ScaledGaussian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/√5^{}√2^{}", self.num, self.exp.k, self.exp.l)
    }
}

/// Divides every entry by 5 (resp. 2) while all are divisible and the
/// exponent allows it.
pub(crate) fn reduce_in_place(entries: &mut [GaussianInteger], exp: &mut DenominatorExponent) {
    let five = BigInt::from(5);
    let two = BigInt::from(2);
    if entries.iter().all(|e| e.is_zero()) {
        exp.k %= 2;
        exp.l %= 2;
        return;
    }
    while exp.k >= 2 && entries.iter().all(|e| e.divisible_by(&five)) {
        for e in entries.iter_mut() {
            *e = e.div_exact(&five);
        }
        exp.k -= 2;
    }
    while exp.l >= 2 && entries.iter().all(|e| e.divisible_by(&two)) {
        for e in entries.iter_mut() {
            *e = e.div_exact(&two);
        }
        exp.l -= 2;
    }
}

/// Brings two exponents to their least common refinement: returns the
/// common exponent and the integer multipliers for each side.
fn common_exponent(
    a: DenominatorExponent,
    b: DenominatorExponent,
) -> Option<(DenominatorExponent, BigInt, BigInt)> {
    if a.k % 2 != b.k % 2 || a.l % 2 != b.l % 2 {
        return None;
    }
    let target = DenominatorExponent::new(a.k.max(b.k), a.l.max(b.l));
    let mul = |e: DenominatorExponent| {
        num_traits::pow(BigInt::from(5), ((target.k - e.k) / 2) as usize)
            << (((target.l - e.l) / 2) as usize)
    };
    Some((target, mul(a), mul(b)))
}

/// A 2×2 matrix `(1/√5^k)(1/√2^l)·[[a, b], [c, d]]` with Gaussian-integer entries.
///
/// Values built through [`ExactUnitary::new`] are checked to be unitary and
/// are kept in least terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactUnitary {
    pub a: GaussianInteger,
    pub b: GaussianInteger,
    pub c: GaussianInteger,
    pub d: GaussianInteger,
    pub exp: DenominatorExponent,
}

impl ExactUnitary {
    /// Validates unitarity, reduces to least terms and requires `l ≤ 2`.
    pub fn new(
        a: GaussianInteger,
        b: GaussianInteger,
        c: GaussianInteger,
        d: GaussianInteger,
        exp: DenominatorExponent,
    ) -> Result<Self, Error> {
        let u = ExactUnitary::raw(a, b, c, d, exp).reduced();
        if !u.is_unitary() {
            return Err(Error::NotRepresentable("matrix is not unitary".into()));
        }
        if !u.exp.is_public() {
            return Err(Error::NotRepresentable(format!(
                "irreducible √2 exponent {}",
                u.exp.l
            )));
        }
        Ok(u)
    }

    pub(crate) fn raw(
        a: GaussianInteger,
        b: GaussianInteger,
        c: GaussianInteger,
        d: GaussianInteger,
        exp: DenominatorExponent,
    ) -> Self {
        ExactUnitary { a, b, c, d, exp }
    }

    pub fn identity() -> Self {
        ExactUnitary::raw(
            GaussianInteger::one(),
            GaussianInteger::zero(),
            GaussianInteger::zero(),
            GaussianInteger::one(),
            DenominatorExponent::default(),
        )
    }

    /// Builds `(1/√N)[[α, −β†], [β, α†]]`, the determinant-one form used by
    /// approximate synthesis.
    pub fn from_columns_det_one(
        alpha: &GaussianInteger,
        beta: &GaussianInteger,
        exp: DenominatorExponent,
    ) -> Result<Self, Error> {
        ExactUnitary::new(
            alpha.clone(),
            -beta.conj(),
            beta.clone(),
            alpha.conj(),
            exp,
        )
    }

    pub fn entries(&self) -> [&GaussianInteger; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub(crate) fn reduced(mut self) -> Self {
        let mut entries = [
            std::mem::take(&mut self.a),
            std::mem::take(&mut self.b),
            std::mem::take(&mut self.c),
            std::mem::take(&mut self.d),
        ];
        reduce_in_place(&mut entries, &mut self.exp);
        let [a, b, c, d] = entries;
        ExactUnitary { a, b, c, d, ..self }
    }

    pub fn is_unitary(&self) -> bool {
        let n = self.exp.squared_denominator();
        self.a.norm() + self.c.norm() == n
            && self.b.norm() + self.d.norm() == n
            && (&self.a.conj() * &self.b) + (&self.c.conj() * &self.d) == GaussianInteger::zero()
    }

    /// Product `self · rhs`, reduced to least terms. `l` may exceed 2 only
    /// when the product is not Clifford+V representable.
    pub fn mul(&self, rhs: &ExactUnitary) -> ExactUnitary {
        let exp = DenominatorExponent::new(self.exp.k + rhs.exp.k, self.exp.l + rhs.exp.l);
        ExactUnitary::raw(
            &(&self.a * &rhs.a) + &(&self.b * &rhs.c),
            &(&self.a * &rhs.b) + &(&self.b * &rhs.d),
            &(&self.c * &rhs.a) + &(&self.d * &rhs.c),
            &(&self.c * &rhs.b) + &(&self.d * &rhs.d),
            exp,
        )
        .reduced()
    }

    pub fn adjoint(&self) -> ExactUnitary {
        ExactUnitary::raw(
            self.a.conj(),
            self.c.conj(),
            self.b.conj(),
            self.d.conj(),
            self.exp,
        )
    }

    /// Determinant as `i^n`, or `None` when it is not a power of `i`.
    pub fn det_power_of_i(&self) -> Option<u8> {
        let num = &(&self.a * &self.d) - &(&self.b * &self.c);
        let n = self.exp.squared_denominator();
        (0..4u8).find(|&p| num == GaussianInteger::unit(p as i64).scale(&n))
    }

    /// Top-left entry as a scaled value.
    pub fn top_left(&self) -> ScaledGaussian {
        ScaledGaussian::new(self.a.clone(), self.exp)
    }

    /// Least `√5` exponent (the matrix is kept in least terms).
    pub fn sqrt5_exponent(&self) -> u32 {
        self.exp.k
    }

    /// True when the matrix has the shape `[[α, −β†], [β, α†]]`.
    pub fn has_det_one_form(&self) -> bool {
        self.d == self.a.conj() && self.b == -self.c.conj()
    }
}

impl ScaledGaussian {
    /// Exact comparison of denoted values for equality, via cross-multiplication.
    pub fn same_value(&self, other: &ScaledGaussian) -> bool {
        match common_exponent(self.exp, other.exp) {
            Some((_, ma, mb)) => self.num.scale(&ma) == other.num.scale(&mb),
            None => self.num.is_zero() && other.num.is_zero(),
        }
    }
}
