use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::real::{Dyadic, Interval};

/// `{u : (u−p)ᵀ D (u−p) ≤ 1}` with `D = [[a, b], [b, d]]` positive definite.
///
/// Entries are exact dyadic rationals, so the set is exactly determined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ellipse {
    pub a: Dyadic,
    pub b: Dyadic,
    pub d: Dyadic,
    pub center: (Dyadic, Dyadic),
}

impl Ellipse {
    pub fn new(a: Dyadic, b: Dyadic, d: Dyadic, center: (Dyadic, Dyadic)) -> Result<Self> {
        let e = Ellipse { a, b, d, center };
        if e.a.signum() <= 0 || e.d.signum() <= 0 || e.det().signum() <= 0 {
            return Err(Error::InvalidArgument(
                "ellipse matrix is not positive definite".into(),
            ));
        }
        Ok(e)
    }

    /// Convenience constructor from doubles.
    pub fn from_f64(a: f64, b: f64, d: f64, center: (f64, f64)) -> Result<Self> {
        Ellipse::new(
            Dyadic::from_f64(a),
            Dyadic::from_f64(b),
            Dyadic::from_f64(d),
            (Dyadic::from_f64(center.0), Dyadic::from_f64(center.1)),
        )
    }

    pub fn unit_disk() -> Self {
        Ellipse {
            a: Dyadic::from_int(1),
            b: Dyadic::zero(),
            d: Dyadic::from_int(1),
            center: (Dyadic::zero(), Dyadic::zero()),
        }
    }

    pub fn det(&self) -> Dyadic {
        self.a.mul(&self.d).sub(&self.b.mul(&self.b))
    }

    /// `(π/4)·√(det D / (a·d))`, the fraction of the bounding box the ellipse fills.
    pub fn uprightness(&self, prec: u32) -> Interval {
        let det = Interval::point(self.det(), prec);
        let ad = Interval::point(self.a.mul(&self.d), prec);
        let ratio = det.div(&ad).expect("a·d > 0");
        Interval::pi(prec).mul_pow2(-2).mul(&ratio.sqrt())
    }

    /// Skew `b²/det D` of the determinant-one rescaling.
    pub fn skew(&self) -> f64 {
        let r = self.b.mul(&self.b).to_rational() / self.det().to_rational();
        rational_to_f64(&r)
    }

    /// Exact membership test for a rational point.
    pub fn contains(&self, x: &BigRational, y: &BigRational) -> bool {
        let dx = x - self.center.0.to_rational();
        let dy = y - self.center.1.to_rational();
        let q = self.a.to_rational() * &dx * &dx
            + self.b.to_rational() * BigRational::from_integer(2.into()) * &dx * &dy
            + self.d.to_rational() * &dy * &dy;
        q <= BigRational::one()
    }

    /// Exact membership test for a dyadic point.
    pub fn contains_dyadic(&self, x: &Dyadic, y: &Dyadic) -> bool {
        let dx = x.sub(&self.center.0);
        let dy = y.sub(&self.center.1);
        let q = self
            .a
            .mul(&dx)
            .mul(&dx)
            .add(&self.b.mul(&dx).mul(&dy).mul_pow2(1))
            .add(&self.d.mul(&dy).mul(&dy));
        q <= Dyadic::from_int(1)
    }

    /// Area `π/√det D`.
    pub fn area(&self, prec: u32) -> Interval {
        Interval::pi(prec).div(&Interval::point(self.det(), prec).sqrt()).expect("det > 0")
    }

    /// Image of the ellipse under `g`: matrix `(g⁻¹)ᵀ D g⁻¹`, center `g·p`.
    pub fn transform(&self, g: &GridOperator) -> Ellipse {
        let inv = g.inverse();
        let m = inv.m.clone().map(|row| row.map(Dyadic::from_int));
        let [[m00, m01], [m10, m11]] = m;
        // D·m
        let dm00 = self.a.mul(&m00).add(&self.b.mul(&m10));
        let dm01 = self.a.mul(&m01).add(&self.b.mul(&m11));
        let dm10 = self.b.mul(&m00).add(&self.d.mul(&m10));
        let dm11 = self.b.mul(&m01).add(&self.d.mul(&m11));
        let a = m00.mul(&dm00).add(&m10.mul(&dm10));
        let b = m00.mul(&dm01).add(&m10.mul(&dm11));
        let d = m01.mul(&dm01).add(&m11.mul(&dm11));
        let [[g00, g01], [g10, g11]] = g.m.clone().map(|row| row.map(Dyadic::from_int));
        let (px, py) = &self.center;
        let center = (
            g00.mul(px).add(&g01.mul(py)),
            g10.mul(px).add(&g11.mul(py)),
        );
        Ellipse { a, b, d, center }
    }
}

impl fmt::Display for Ellipse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "D=[[{:e}, {:e}], [{:e}, {:e}]] p=({:e}, {:e})",
            self.a.to_f64(),
            self.b.to_f64(),
            self.b.to_f64(),
            self.d.to_f64(),
            self.center.0.to_f64(),
            self.center.1.to_f64()
        )
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    crate::real::rational_to_dyadic(r, 60, crate::real::Round::Down).to_f64()
}

/// A 2×2 integer matrix of determinant ±1, acting on `Z²` bijectively.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridOperator {
    m: [[BigInt; 2]; 2],
}

impl GridOperator {
    pub fn new(m: [[BigInt; 2]; 2]) -> Result<Self> {
        let g = GridOperator { m };
        if g.det().abs() != BigInt::one() {
            return Err(Error::InvalidArgument(
                "grid operator must have determinant ±1".into(),
            ));
        }
        Ok(g)
    }

    pub fn identity() -> Self {
        GridOperator {
            m: [[1.into(), 0.into()], [0.into(), 1.into()]],
        }
    }

    /// The shear `[[1, n], [0, 1]]`, i.e. `Aⁿ`.
    pub fn shear_a(n: BigInt) -> Self {
        GridOperator {
            m: [[1.into(), n], [0.into(), 1.into()]],
        }
    }

    /// The shear `[[1, 0], [n, 1]]`, i.e. `Bⁿ`.
    pub fn shear_b(n: BigInt) -> Self {
        GridOperator {
            m: [[1.into(), 0.into()], [n, 1.into()]],
        }
    }

    pub fn entries(&self) -> &[[BigInt; 2]; 2] {
        &self.m
    }

    pub fn det(&self) -> BigInt {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn is_identity(&self) -> bool {
        *self == GridOperator::identity()
    }

    pub fn inverse(&self) -> GridOperator {
        let [[a, b], [c, d]] = &self.m;
        let det = self.det();
        GridOperator {
            m: [[d * &det, -b * &det], [-c * &det, a * &det]],
        }
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &GridOperator) -> GridOperator {
        let p = |i: usize, j: usize| &self.m[i][0] * &rhs.m[0][j] + &self.m[i][1] * &rhs.m[1][j];
        GridOperator {
            m: [[p(0, 0), p(0, 1)], [p(1, 0), p(1, 1)]],
        }
    }

    pub fn apply(&self, v: (&BigInt, &BigInt)) -> (BigInt, BigInt) {
        (
            &self.m[0][0] * v.0 + &self.m[0][1] * v.1,
            &self.m[1][0] * v.0 + &self.m[1][1] * v.1,
        )
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> (BigInt, BigInt) {
        (self.m[0][j].clone(), self.m[1][j].clone())
    }
}

impl fmt::Display for GridOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

/// Finds a grid operator `G` making `G(E)` at least 1/2-upright, by
/// repeated shears that at least halve the skew. Returns `G` and the number
/// of shear steps.
pub fn make_upright(e: &Ellipse) -> (GridOperator, usize) {
    let mut a = e.a.to_rational();
    let mut b = e.b.to_rational();
    let mut d = e.d.to_rational();
    let two = BigRational::from_integer(2.into());
    let mut g = GridOperator::identity();
    let mut steps = 0;
    // Normalized skew b²/det > 1  ⇔  2b² > ad.
    while &two * &b * &b > &a * &d {
        if a <= d {
            let n = nearest_integer(&(-&b / &a));
            let nr = BigRational::from_integer(n.clone());
            // D ← (Aⁿ)ᵀ D Aⁿ
            let nb = &nr * &a + &b;
            d = &nr * &nr * &a + &two * &nr * &b + &d;
            b = nb;
            g = GridOperator::shear_a(-n).compose(&g);
        } else {
            let n = nearest_integer(&(-&b / &d));
            let nr = BigRational::from_integer(n.clone());
            let nb = &nr * &d + &b;
            a = &a + &two * &nr * &b + &nr * &nr * &d;
            b = nb;
            g = GridOperator::shear_b(-n).compose(&g);
        }
        steps += 1;
    }
    (g, steps)
}

fn nearest_integer(x: &BigRational) -> BigInt {
    let twice = x * BigRational::from_integer(2.into());
    (twice.numer() + twice.denom()).div_floor(&(twice.denom() * 2))
}
