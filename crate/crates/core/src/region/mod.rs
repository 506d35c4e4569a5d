//! Convex regions, enclosing ellipses, grid operators, and enumeration of
//! scaled Gaussian integers inside a region.

mod ellipse;
mod enumerate;
mod epsilon;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub use ellipse::{make_upright, Ellipse, GridOperator};
pub(crate) use ellipse::rational_to_f64;
pub use enumerate::{candidate_stream, enumerate_level, CandidateStream, LevelEnumerator};
pub use epsilon::EpsilonRegion;

use crate::real::{Dyadic, Interval};
use crate::ring::{GaussianInteger, ScaledGaussian};

/// A bounded convex subset `A` of the plane, identified with `C`.
///
/// Points are tested at a scale: `α ∈ √N·A` means `α/√N ∈ A`.
pub trait ConvexRegion {
    /// An ellipse containing the region.
    fn enclosing_ellipse(&self) -> Ellipse;

    /// Decides `α/√N ∈ A`; boundary points are members.
    fn contains_scaled(&self, alpha: &GaussianInteger, n: &BigInt) -> bool;

    /// Integer bounds `[t₀, t₁]` containing every integer `t` with
    /// `origin + t·dir ∈ √N·A`, or `None` when there is none. The bounds may
    /// be loose; membership is decided separately.
    fn line_range(
        &self,
        n: &BigInt,
        origin: &GaussianInteger,
        dir: &GaussianInteger,
    ) -> Option<(BigInt, BigInt)>;

    fn contains(&self, x: &ScaledGaussian) -> bool {
        self.contains_scaled(&x.num, &x.exp.squared_denominator())
    }
}

impl<R: ConvexRegion + ?Sized> ConvexRegion for &R {
    fn enclosing_ellipse(&self) -> Ellipse {
        (**self).enclosing_ellipse()
    }

    fn contains_scaled(&self, alpha: &GaussianInteger, n: &BigInt) -> bool {
        (**self).contains_scaled(alpha, n)
    }

    fn line_range(
        &self,
        n: &BigInt,
        origin: &GaussianInteger,
        dir: &GaussianInteger,
    ) -> Option<(BigInt, BigInt)> {
        (**self).line_range(n, origin, dir)
    }
}

/// Exact comparison of `a·√n` with `b` for `n ≥ 0`.
pub fn cmp_mul_sqrt(a: &BigRational, n: &BigInt, b: &BigRational) -> Ordering {
    let lhs_sign = if n.is_zero() { 0 } else { sign(a) };
    let rhs_sign = sign(b);
    if lhs_sign != rhs_sign {
        return lhs_sign.cmp(&rhs_sign);
    }
    if lhs_sign == 0 {
        return Ordering::Equal;
    }
    let l2 = a * a * BigRational::from_integer(n.clone());
    let r2 = b * b;
    if lhs_sign > 0 {
        l2.cmp(&r2)
    } else {
        r2.cmp(&l2)
    }
}

fn sign(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn int(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

/// Precision adequate for line intersections involving these magnitudes.
fn line_prec(n: &BigInt, origin: &GaussianInteger, dir: &GaussianInteger) -> u32 {
    let bits = [&origin.re, &origin.im, &dir.re, &dir.im]
        .iter()
        .map(|x| x.bits())
        .max()
        .unwrap_or(0);
    (64 + n.bits() / 2 + 2 * bits) as u32
}

/// Outward integer bounds of an interval.
fn int_bounds(lo: &Interval, hi: &Interval) -> (BigInt, BigInt) {
    (lo.lower().ceil(), hi.upper().floor())
}

/// Integer `t` range where `|origin + t·dir|² ≤ N`, computed exactly.
pub(crate) fn disk_line_range(
    n: &BigInt,
    origin: &GaussianInteger,
    dir: &GaussianInteger,
) -> Option<(BigInt, BigInt)> {
    let dd = dir.norm();
    if dd.is_zero() {
        return (origin.norm() <= *n).then(|| (BigInt::zero(), BigInt::zero()));
    }
    let od = &origin.re * &dir.re + &origin.im * &dir.im;
    let disc = &od * &od - &dd * (origin.norm() - n);
    if disc.is_negative() {
        return None;
    }
    let r = disc.sqrt();
    let r1 = &r + 1;
    // √disc ∈ [r, r+1), so these bounds are outer.
    let lo = num_integer::Integer::div_floor(&(-&od - &r1), &dd);
    let hi = num_integer::Integer::div_ceil(&(-&od + &r1), &dd);
    Some((lo, hi))
}

/// `[x₀, x₁] × [y₀, y₁]` with rational corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rect {
    pub x0: BigRational,
    pub x1: BigRational,
    pub y0: BigRational,
    pub y1: BigRational,
}

impl Rect {
    pub fn new(x0: BigRational, x1: BigRational, y0: BigRational, y1: BigRational) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "empty rectangle");
        Rect { x0, x1, y0, y1 }
    }
}

impl ConvexRegion for Rect {
    fn enclosing_ellipse(&self) -> Ellipse {
        // Circumscribed ellipse of the rectangle, slightly inflated.
        let prec = 128;
        let half = |a: &BigRational, b: &BigRational| {
            let w = (b - a) / BigRational::from_integer(2.into());
            let w = if w.is_zero() {
                BigRational::new(1.into(), (1u64 << 40).into())
            } else {
                w
            };
            Interval::from_rational(&w, prec)
        };
        let wx = half(&self.x0, &self.x1);
        let wy = half(&self.y0, &self.y1);
        let inv_axis2 = |w: &Interval| {
            let two_w2 = w.square().mul_pow2(1);
            Interval::from_int(1, prec).div(&two_w2).expect("w > 0").lower().clone()
        };
        let shrink = |x: Dyadic| x.sub(&x.mul_pow2(-20));
        let c = |a: &BigRational, b: &BigRational| {
            Interval::from_rational(&((a + b) / BigRational::from_integer(2.into())), prec).mid()
        };
        Ellipse::new(
            shrink(inv_axis2(&wx)),
            Dyadic::zero(),
            shrink(inv_axis2(&wy)),
            (c(&self.x0, &self.x1), c(&self.y0, &self.y1)),
        )
        .expect("axis-aligned ellipse")
    }

    fn contains_scaled(&self, alpha: &GaussianInteger, n: &BigInt) -> bool {
        let x = int(&alpha.re);
        let y = int(&alpha.im);
        cmp_mul_sqrt(&self.x0, n, &x) != Ordering::Greater
            && cmp_mul_sqrt(&self.x1, n, &x) != Ordering::Less
            && cmp_mul_sqrt(&self.y0, n, &y) != Ordering::Greater
            && cmp_mul_sqrt(&self.y1, n, &y) != Ordering::Less
    }

    fn line_range(
        &self,
        n: &BigInt,
        origin: &GaussianInteger,
        dir: &GaussianInteger,
    ) -> Option<(BigInt, BigInt)> {
        let prec = line_prec(n, origin, dir);
        let s = Interval::from_int(n.clone(), prec).sqrt();
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for (o, d, a, b) in [
            (&origin.re, &dir.re, &self.x0, &self.x1),
            (&origin.im, &dir.im, &self.y0, &self.y1),
        ] {
            if d.is_zero() {
                let o = int(o);
                if cmp_mul_sqrt(a, n, &o) == Ordering::Greater
                    || cmp_mul_sqrt(b, n, &o) == Ordering::Less
                {
                    return None;
                }
                continue;
            }
            let oi = Interval::from_int(o.clone(), prec);
            let di = Interval::from_int(d.clone(), prec);
            let ta = Interval::from_rational(a, prec).mul(&s).sub(&oi).div(&di)?;
            let tb = Interval::from_rational(b, prec).mul(&s).sub(&oi).div(&di)?;
            let (l, h) = if d.is_positive() {
                int_bounds(&ta, &tb)
            } else {
                int_bounds(&tb, &ta)
            };
            lo = Some(lo.map_or(l.clone(), |x| x.max(l)));
            hi = Some(hi.map_or(h.clone(), |x| x.min(h)));
        }
        match (lo, hi) {
            (Some(l), Some(h)) => (l <= h).then_some((l, h)),
            // dir = 0: the single point `origin` is a member.
            _ => Some((BigInt::zero(), BigInt::zero())),
        }
    }
}

/// Closed disk with rational center and radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disk {
    pub cx: BigRational,
    pub cy: BigRational,
    pub r: BigRational,
}

impl Disk {
    pub fn new(cx: BigRational, cy: BigRational, r: BigRational) -> Self {
        assert!(r.is_positive(), "radius must be positive");
        Disk { cx, cy, r }
    }

    pub fn unit() -> Self {
        Disk::new(BigRational::zero(), BigRational::zero(), BigRational::from_integer(1.into()))
    }
}

impl ConvexRegion for Disk {
    fn enclosing_ellipse(&self) -> Ellipse {
        let prec = 128;
        let r = Interval::from_rational(&self.r, prec);
        let a = Interval::from_int(1, prec).div(&r.square()).expect("r > 0").lower().clone();
        let a = a.sub(&a.mul_pow2(-20));
        Ellipse::new(
            a.clone(),
            Dyadic::zero(),
            a,
            (
                Interval::from_rational(&self.cx, prec).mid(),
                Interval::from_rational(&self.cy, prec).mid(),
            ),
        )
        .expect("disk ellipse")
    }

    fn contains_scaled(&self, alpha: &GaussianInteger, n: &BigInt) -> bool {
        // |α − c√N|² ≤ r²N  ⇔  2(c·α)√N ≥ |α|² + (|c|² − r²)N
        let x = int(&alpha.re);
        let y = int(&alpha.im);
        let lin = (&self.cx * &x + &self.cy * &y) * BigRational::from_integer(2.into());
        let rhs = int(&alpha.norm())
            + (&self.cx * &self.cx + &self.cy * &self.cy - &self.r * &self.r) * int(n);
        cmp_mul_sqrt(&lin, n, &rhs) != Ordering::Less
    }

    fn line_range(
        &self,
        n: &BigInt,
        origin: &GaussianInteger,
        dir: &GaussianInteger,
    ) -> Option<(BigInt, BigInt)> {
        let prec = line_prec(n, origin, dir);
        let s = Interval::from_int(n.clone(), prec).sqrt();
        let px = Interval::from_int(origin.re.clone(), prec)
            .sub(&Interval::from_rational(&self.cx, prec).mul(&s));
        let py = Interval::from_int(origin.im.clone(), prec)
            .sub(&Interval::from_rational(&self.cy, prec).mul(&s));
        let dx = Interval::from_int(dir.re.clone(), prec);
        let dy = Interval::from_int(dir.im.clone(), prec);
        let dd = dx.square().add(&dy.square());
        if dir.is_zero() {
            return self
                .contains_scaled(origin, n)
                .then(|| (BigInt::zero(), BigInt::zero()));
        }
        let pd = px.mul(&dx).add(&py.mul(&dy));
        let r2n = Interval::from_rational(&self.r, prec).square().mul_int(n);
        let pp = px.square().add(&py.square()).sub(&r2n);
        let disc = pd.square().sub(&dd.mul(&pp));
        if disc.upper().signum() < 0 {
            return None;
        }
        let root = disc.sqrt();
        let lo = pd.neg().sub(&root).div(&dd)?;
        let hi = pd.neg().add(&root).div(&dd)?;
        let (l, h) = int_bounds(&lo, &hi);
        (l <= h).then_some((l, h))
    }
}
