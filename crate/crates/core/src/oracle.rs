//! Brute-force reference: every distinct Clifford+V unitary up to a V-count,
//! level by level, and the true minimal V-count for an `(θ, ε)` instance.

use std::collections::HashSet;

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::exact::{clifford_table, Circuit, Gate};
use crate::expr::Expr;
use crate::region::{ConvexRegion, EpsilonRegion};
use crate::ring::{DenominatorExponent, ExactUnitary, GaussianInteger};
use crate::synth::distance;

pub const DEFAULT_MAX_VCOUNT: u32 = 5;
/// Level `k` holds `1152·5^(k−1)` operators; beyond this the tables outgrow
/// desk-scale memory.
pub const MAX_VCOUNT_LIMIT: u32 = 6;

/// Numerators `[a, b, c, d]` as `(re, im)` pairs and the `√2` exponent; the
/// `√5` exponent is the level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CompactUnitary {
    pub entries: [i16; 8],
    pub l: u8,
}

impl CompactUnitary {
    fn from_exact(u: &ExactUnitary) -> Self {
        CompactUnitary::try_from_exact(u).expect("small entries")
    }

    fn try_from_exact(u: &ExactUnitary) -> Option<Self> {
        let mut entries = [0i16; 8];
        for (i, g) in u.entries().iter().enumerate() {
            entries[2 * i] = i16::try_from(&g.re).ok()?;
            entries[2 * i + 1] = i16::try_from(&g.im).ok()?;
        }
        Some(CompactUnitary {
            entries,
            l: u.exp.l as u8,
        })
    }

    pub fn to_exact(&self, k: u32) -> ExactUnitary {
        let g = |i: usize| GaussianInteger::new(self.entries[2 * i], self.entries[2 * i + 1]);
        ExactUnitary::new(g(0), g(1), g(2), g(3), DenominatorExponent::new(k, self.l as u32))
            .expect("stored operators are unitary")
    }

    /// `V·self` for `V = m/√5`, with the result's `√5` exponent raised by one
    /// or, when every entry is divisible by 5, lowered by one.
    fn left_mul(&self, m: &[(i64, i64); 4]) -> ([i64; 8], bool) {
        let e = |i: usize| (self.entries[2 * i] as i64, self.entries[2 * i + 1] as i64);
        let mul = |(a, b): (i64, i64), (c, d): (i64, i64)| (a * c - b * d, a * d + b * c);
        let add = |(a, b): (i64, i64), (c, d): (i64, i64)| (a + c, b + d);
        let p = [
            add(mul(m[0], e(0)), mul(m[1], e(2))),
            add(mul(m[0], e(1)), mul(m[1], e(3))),
            add(mul(m[2], e(0)), mul(m[3], e(2))),
            add(mul(m[2], e(1)), mul(m[3], e(3))),
        ];
        let mut out = [0i64; 8];
        for (i, (re, im)) in p.iter().enumerate() {
            out[2 * i] = *re;
            out[2 * i + 1] = *im;
        }
        let lowered = out.iter().all(|x| x % 5 == 0);
        (out, lowered)
    }

    fn f64_entries(&self, k: u32) -> [(f64, f64); 4] {
        let s = (5f64.powi(k as i32) * 2f64.powi(self.l as i32)).sqrt();
        let g = |i: usize| (self.entries[2 * i] as f64 / s, self.entries[2 * i + 1] as f64 / s);
        [g(0), g(1), g(2), g(3)]
    }
}

/// All operators of least `√5` exponent `level`, in discovery order.
#[derive(Clone, Debug)]
pub struct OperatorLevelSet {
    pub level: u32,
    members: Vec<CompactUnitary>,
    /// Index in the previous level and the V gate applied on the left.
    parents: Vec<(u32, u8)>,
}

impl OperatorLevelSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[CompactUnitary] {
        &self.members
    }

    pub fn unitary(&self, i: usize) -> ExactUnitary {
        self.members[i].to_exact(self.level)
    }

    /// Index of `u` in this level, by linear scan.
    pub fn position(&self, u: &ExactUnitary) -> Option<usize> {
        if u.exp.k != self.level || u.exp.l > 2 {
            return None;
        }
        let c = CompactUnitary::try_from_exact(u)?;
        self.members.iter().position(|m| *m == c)
    }
}

/// Breadth-first levels of the Clifford+V group.
#[derive(Clone, Debug)]
pub struct Oracle {
    levels: Vec<OperatorLevelSet>,
}

fn v_numerators() -> [[(i64, i64); 4]; 6] {
    Gate::V_GATES.map(|g| {
        let m = g.matrix();
        let [a, b, c, d] = m.entries();
        let t = |x: &GaussianInteger| (i64::try_from(&x.re).unwrap(), i64::try_from(&x.im).unwrap());
        [t(a), t(b), t(c), t(d)]
    })
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new()
    }
}

impl Oracle {
    /// Level 0 only: the 192 Cliffords.
    pub fn new() -> Self {
        let group = clifford_table().group();
        let members: Vec<CompactUnitary> = group.iter().map(|(m, _)| CompactUnitary::from_exact(m)).collect();
        let parents = (0..members.len() as u32).map(|i| (i, u8::MAX)).collect();
        Oracle {
            levels: vec![OperatorLevelSet {
                level: 0,
                members,
                parents,
            }],
        }
    }

    pub fn with_levels(max_vcount: u32) -> Result<Self> {
        let mut o = Oracle::new();
        o.extend_to(max_vcount)?;
        Ok(o)
    }

    pub fn levels(&self) -> &[OperatorLevelSet] {
        &self.levels
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn extend_to(&mut self, max_vcount: u32) -> Result<()> {
        if max_vcount > MAX_VCOUNT_LIMIT {
            return Err(Error::ResourceCap(format!(
                "oracle levels above {MAX_VCOUNT_LIMIT} are not supported (asked for {max_vcount})"
            )));
        }
        let vs = v_numerators();
        while self.max_level() < max_vcount {
            let prev = self.levels.last().expect("level 0 exists");
            let level = prev.level + 1;
            let mut seen = HashSet::with_capacity(prev.len() * 5);
            let mut members = Vec::with_capacity(prev.len() * 5);
            let mut parents = Vec::with_capacity(prev.len() * 5);
            for (i, u) in prev.members.iter().enumerate() {
                for (g, m) in vs.iter().enumerate() {
                    let (p, lowered) = u.left_mul(m);
                    if lowered {
                        continue;
                    }
                    let mut entries = [0i16; 8];
                    for (dst, src) in entries.iter_mut().zip(p) {
                        *dst = i16::try_from(src).map_err(|_| Error::ResourceCap("entry overflow".into()))?;
                    }
                    let c = CompactUnitary { entries, l: u.l };
                    if seen.insert(c) {
                        members.push(c);
                        parents.push((i as u32, g as u8));
                    }
                }
            }
            self.levels.push(OperatorLevelSet {
                level,
                members,
                parents,
            });
        }
        Ok(())
    }

    /// A circuit for member `i` of level `k`, read off the BFS parents.
    pub fn witness(&self, k: u32, i: usize) -> Circuit {
        let mut gates = Vec::new();
        let (mut k, mut i) = (k as usize, i);
        while k > 0 {
            let (p, g) = self.levels[k].parents[i];
            gates.push(Gate::V_GATES[g as usize]);
            i = p as usize;
            k -= 1;
        }
        gates.extend_from_slice(clifford_table().group().word(i));
        Circuit::new(gates)
    }

    /// Smallest `k ≤ max_vcount` with a level-`k` operator within `ε` of
    /// `R_z(θ)`, together with a witness circuit. Levels up to `max_vcount`
    /// must already be built.
    pub fn min_vcount(
        &self,
        theta: &Expr,
        epsilon: &BigRational,
        max_vcount: u32,
    ) -> Result<Option<(u32, Circuit)>> {
        let region = EpsilonRegion::new(theta.clone(), epsilon.clone(), None)?;
        let th = theta.eval(64)?.to_f64();
        let eps = crate::region::rational_to_f64(epsilon);
        let (s, c) = (th / 2.0).sin_cos();
        if max_vcount > self.max_level() {
            return Err(Error::Precondition(format!(
                "oracle built to level {}, queried up to {max_vcount}",
                self.max_level()
            )));
        }
        for k in 0..=max_vcount {
            let level = &self.levels[k as usize];
            for (i, u) in level.members.iter().enumerate() {
                let d = f64_distance(&u.f64_entries(k), c, s);
                if d > eps + 1e-9 {
                    continue;
                }
                if within(&u.to_exact(k), theta, epsilon, &region)? {
                    return Ok(Some((k, self.witness(k, i))));
                }
            }
        }
        Ok(None)
    }
}

fn f64_distance(e: &[(f64, f64); 4], c: f64, s: f64) -> f64 {
    let m = [(e[0].0 - c, e[0].1 + s), e[1], e[2], (e[3].0 - c, e[3].1 - s)];
    let frob: f64 = m.iter().map(|(x, y)| x * x + y * y).sum();
    let det = (
        m[0].0 * m[3].0 - m[0].1 * m[3].1 - (m[1].0 * m[2].0 - m[1].1 * m[2].1),
        m[0].0 * m[3].1 + m[0].1 * m[3].0 - (m[1].0 * m[2].1 + m[1].1 * m[2].0),
    );
    let det2 = det.0 * det.0 + det.1 * det.1;
    ((frob + (frob * frob - 4.0 * det2).max(0.0).sqrt()) / 2.0).sqrt()
}

/// Rigorous `‖U − R_z(θ)‖ ≤ ε`: interval evaluation at growing precision,
/// then the exact region test for determinant-one operators on a tie.
fn within(u: &ExactUnitary, theta: &Expr, epsilon: &BigRational, region: &EpsilonRegion) -> Result<bool> {
    for prec in [128, 256, 512, 1024] {
        let d = distance(u, theta, prec)?;
        if d.upper().to_rational() <= *epsilon {
            return Ok(true);
        }
        if d.lower().to_rational() > *epsilon {
            return Ok(false);
        }
    }
    Ok(u.has_det_one_form() && region.contains_scaled(&u.a, &u.exp.squared_denominator()))
}

/// Levels `0..=max_vcount`.
pub fn enumerate_levels(max_vcount: u32) -> Result<Vec<OperatorLevelSet>> {
    Ok(Oracle::with_levels(max_vcount)?.levels)
}

pub fn min_vcount(theta: &Expr, epsilon: &BigRational, max_vcount: u32) -> Result<Option<(u32, Circuit)>> {
    Oracle::with_levels(max_vcount)?.min_vcount(theta, epsilon, max_vcount)
}
