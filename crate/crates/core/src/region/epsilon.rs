use std::cmp::Ordering;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{cmp_mul_sqrt, disk_line_range, line_prec, ConvexRegion, Ellipse};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::real::Interval;
use crate::ring::GaussianInteger;

/// Doubling steps allowed when a membership test is undecided.
const MAX_REFINEMENTS: u32 = 4;

/// `{u : |u| ≤ 1, z·u ≥ 1 − ε²/2}` with `z = (cos(−θ/2), sin(−θ/2))`: the
/// top-left entries of determinant-one unitaries within `ε` of `R_z(θ)`.
#[derive(Debug)]
pub struct EpsilonRegion {
    theta: Expr,
    epsilon: BigRational,
    chord: BigRational,
    prec: u32,
    exact_z: Option<(i8, i8, u8)>,
    z_cache: Mutex<Vec<(Interval, Interval)>>,
}

impl EpsilonRegion {
    /// `prec` is the working precision in bits; `None` picks
    /// `max(128, 2⌈log₂(1/ε)⌉ + 64)`.
    pub fn new(theta: Expr, epsilon: BigRational, prec: Option<u32>) -> Result<Self> {
        if !epsilon.is_positive() {
            return Err(Error::InvalidArgument("epsilon must be positive".into()));
        }
        let two = BigRational::from_integer(2.into());
        let mut chord = BigRational::one() - &epsilon * &epsilon / &two;
        let minus_one = -BigRational::one();
        if chord < minus_one {
            chord = minus_one;
        }
        let prec = prec.unwrap_or_else(|| default_precision(&epsilon));
        let exact_z = exact_half_angle(&theta);
        let region = EpsilonRegion {
            theta,
            epsilon,
            chord,
            prec,
            exact_z,
            z_cache: Mutex::new(Vec::new()),
        };
        region.z(prec)?;
        Ok(region)
    }

    pub fn theta(&self) -> &Expr {
        &self.theta
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    /// `1 − ε²/2`, clamped at −1.
    pub fn chord(&self) -> &BigRational {
        &self.chord
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Enclosure of `z` at `prec` bits (cached per precision).
    pub fn z(&self, prec: u32) -> Result<(Interval, Interval)> {
        let mut cache = self.z_cache.lock().expect("z cache poisoned");
        if let Some(z) = cache.iter().find(|(x, _)| x.prec() >= prec) {
            return Ok(z.clone());
        }
        let half = self.theta.eval(prec + 16)?.mul_pow2(-1);
        let (s, c) = half.sin_cos();
        let z = (c.with_prec(prec), s.neg().with_prec(prec));
        cache.push(z.clone());
        Ok(z)
    }

    /// Rigorous enclosure of `z·α`.
    fn dot(&self, alpha: &GaussianInteger, prec: u32) -> Interval {
        let (zx, zy) = self.z(prec).expect("angle evaluated at construction");
        zx.mul_int(&alpha.re).add(&zy.mul_int(&alpha.im))
    }

    /// Decides `z·α ≥ c·√N`, where `N` already satisfies `|α|² ≤ N`.
    fn half_plane(&self, alpha: &GaussianInteger, n: &BigInt) -> bool {
        if let Some((p, q, m)) = self.exact_z {
            // z = (p, q)/√m, so the test is p·x + q·y ≥ c·√(mN).
            let lhs = BigRational::from_integer(&alpha.re * p + &alpha.im * q);
            let mn = n * BigInt::from(m);
            return cmp_mul_sqrt(&self.chord, &mn, &lhs) != Ordering::Greater;
        }
        let extra = (alpha.re.bits().max(alpha.im.bits())) as u32;
        let mut prec = self.prec + extra;
        for _ in 0..=MAX_REFINEMENTS {
            let lhs = self.dot(alpha, prec);
            let rhs = Interval::from_rational(&self.chord, prec)
                .mul(&Interval::from_int(n.clone(), prec).sqrt());
            if let Some(v) = lhs.ge(&rhs) {
                return v;
            }
            prec *= 2;
        }
        // Undecidable at every tried precision: treat as outside.
        false
    }
}

fn default_precision(epsilon: &BigRational) -> u32 {
    // ⌈log₂(1/ε)⌉ from the bit lengths of numerator and denominator.
    let log = epsilon.denom().bits() as i64 - epsilon.numer().bits() as i64 + 1;
    (2 * log.max(0) + 64).max(128) as u32
}

/// `z` exactly, as `(p, q)/√m`, when `θ/2` is a multiple of `π/4`.
fn exact_half_angle(theta: &Expr) -> Option<(i8, i8, u8)> {
    let (a, b) = theta.as_linear_in_pi()?;
    if !a.is_zero() {
        return None;
    }
    // θ/2 = jπ/4 with j = 2b.
    let j = &b * BigRational::from_integer(2.into());
    if !j.is_integer() {
        return None;
    }
    let j = j.to_integer().mod_floor_8()?;
    Some(match j {
        0 => (1, 0, 1),
        1 => (1, -1, 2),
        2 => (0, -1, 1),
        3 => (-1, -1, 2),
        4 => (-1, 0, 1),
        5 => (-1, 1, 2),
        6 => (0, 1, 1),
        _ => (1, 1, 2),
    })
}

trait ModEight {
    fn mod_floor_8(&self) -> Option<u8>;
}

impl ModEight for BigInt {
    fn mod_floor_8(&self) -> Option<u8> {
        num_integer::Integer::mod_floor(self, &BigInt::from(8)).to_u8()
    }
}

impl ConvexRegion for EpsilonRegion {
    /// The circumscribed ellipse of the segment's bounding rectangle
    /// `[c, 1] × [−h, h]` in the frame where `z` is the first axis.
    fn enclosing_ellipse(&self) -> Ellipse {
        let prec = self.prec + 64;
        let one = Interval::from_int(1, prec);
        let c = Interval::from_rational(&self.chord, prec);
        let w = one.sub(&c);
        let h = if self.chord.is_positive() {
            one.sub(&c.square()).sqrt()
        } else {
            one.clone()
        };
        let (zx, zy) = self.z(prec).expect("angle evaluated at construction");
        // Semi-axes (w/2)√2 along z and h√2 across it.
        let p = one.div(&w.square().mul_pow2(-1)).expect("w > 0");
        let q = one.div(&h.square().mul_pow2(1)).expect("h > 0");
        let a = zx.square().mul(&p).add(&zy.square().mul(&q));
        let b = zx.mul(&zy).mul(&p.sub(&q));
        let d = zy.square().mul(&p).add(&zx.square().mul(&q));
        let shrink = |x: &Interval| {
            let m = x.mid();
            m.sub(&m.mul_pow2(-20))
        };
        let center_scale = c.add(&one).mul_pow2(-1);
        Ellipse::new(
            shrink(&a),
            b.mid().sub(&b.mid().mul_pow2(-20)),
            shrink(&d),
            (
                center_scale.mul(&zx).mid(),
                center_scale.mul(&zy).mid(),
            ),
        )
        .expect("enclosing ellipse is positive definite")
    }

    fn contains_scaled(&self, alpha: &GaussianInteger, n: &BigInt) -> bool {
        alpha.norm() <= *n && self.half_plane(alpha, n)
    }

    fn line_range(
        &self,
        n: &BigInt,
        origin: &GaussianInteger,
        dir: &GaussianInteger,
    ) -> Option<(BigInt, BigInt)> {
        let (mut lo, mut hi) = disk_line_range(n, origin, dir)?;
        let prec = self.prec + line_prec(n, origin, dir);
        let (zx, zy) = self.z(prec).ok()?;
        let zd = zx.mul_int(&dir.re).add(&zy.mul_int(&dir.im));
        if !zd.contains_zero() {
            let zo = zx.mul_int(&origin.re).add(&zy.mul_int(&origin.im));
            let rhs = Interval::from_rational(&self.chord, prec)
                .mul(&Interval::from_int(n.clone(), prec).sqrt());
            let t = rhs.sub(&zo).div(&zd).expect("zd excludes zero");
            if zd.lower().signum() > 0 {
                lo = lo.max(t.lower().ceil());
            } else {
                hi = hi.min(t.upper().floor());
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

impl EpsilonRegion {
    /// Approximate `1 − ε²/2` for display and statistics.
    pub fn chord_f64(&self) -> f64 {
        super::ellipse::rational_to_f64(&self.chord)
    }

}
