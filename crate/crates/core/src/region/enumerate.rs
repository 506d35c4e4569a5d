use std::collections::VecDeque;

use num_bigint::BigInt;

use super::{make_upright, ConvexRegion, Ellipse, GridOperator};
use crate::real::Interval;
use crate::ring::{DenominatorExponent, GaussianInteger, ScaledGaussian};

/// Lazily yields the least-terms points `α/(√5^k√2^l)` of a region at one
/// exponent, one lattice line at a time.
///
/// The lines are rows (or columns, whichever axis is shorter) of the
/// bounding box of `G(√N·E)`, where `E` encloses the region and `G` makes
/// it upright; each line is pulled back through `G⁻¹` and clipped against
/// the region itself.
pub struct LevelEnumerator<'a, R: ?Sized> {
    region: &'a R,
    exp: DenominatorExponent,
    n: BigInt,
    /// Pull-back of the line origin step and of the in-line direction.
    step: GaussianInteger,
    dir: GaussianInteger,
    line: BigInt,
    last_line: BigInt,
    buffer: VecDeque<GaussianInteger>,
    lines_scanned: u64,
}

impl<'a, R: ConvexRegion + ?Sized> LevelEnumerator<'a, R> {
    pub fn new(region: &'a R, ellipse: &Ellipse, g: &GridOperator, exp: DenominatorExponent) -> Self {
        let n = exp.squared_denominator();
        let (line, last_line, axis) = line_span(ellipse, g, &n);
        let inv = g.inverse();
        let (c0, c1) = (inv.column(0), inv.column(1));
        let gi = |(re, im): (BigInt, BigInt)| GaussianInteger { re, im };
        // Fixing v_axis = y sweeps v = y·e_axis + t·e_other.
        let (step, dir) = if axis == 1 { (gi(c1), gi(c0)) } else { (gi(c0), gi(c1)) };
        LevelEnumerator {
            region,
            exp,
            n,
            step,
            dir,
            line,
            last_line,
            buffer: VecDeque::new(),
            lines_scanned: 0,
        }
    }

    pub fn exponent(&self) -> DenominatorExponent {
        self.exp
    }

    pub fn lines_scanned(&self) -> u64 {
        self.lines_scanned
    }

    fn fill(&mut self) -> bool {
        while self.buffer.is_empty() {
            if self.line > self.last_line {
                return false;
            }
            let origin = self.step.scale(&self.line);
            self.line += 1;
            self.lines_scanned += 1;
            let Some((lo, hi)) = self.region.line_range(&self.n, &origin, &self.dir) else {
                continue;
            };
            let mut t = lo;
            let mut alpha = &origin + &self.dir.scale(&t);
            while t <= hi {
                if is_least(&alpha, self.exp) && self.region.contains_scaled(&alpha, &self.n) {
                    self.buffer.push_back(alpha.clone());
                }
                alpha = &alpha + &self.dir;
                t += 1;
            }
        }
        true
    }
}

impl<R: ConvexRegion + ?Sized> Iterator for LevelEnumerator<'_, R> {
    type Item = ScaledGaussian;

    fn next(&mut self) -> Option<ScaledGaussian> {
        if !self.fill() {
            return None;
        }
        self.buffer
            .pop_front()
            .map(|a| ScaledGaussian::new(a, self.exp))
    }
}

fn is_least(alpha: &GaussianInteger, exp: DenominatorExponent) -> bool {
    let five = BigInt::from(5);
    let two = BigInt::from(2);
    (exp.k < 2 || !alpha.divisible_by(&five)) && (exp.l < 2 || !alpha.divisible_by(&two))
}

/// Integer range of the shorter bounding-box axis of `G(√N·E)` and that axis.
fn line_span(e: &Ellipse, g: &GridOperator, n: &BigInt) -> (BigInt, BigInt, usize) {
    let t = e.transform(g);
    let prec = 96
        + (n.bits() / 2) as u32
        + [&t.a, &t.b, &t.d, &t.center.0, &t.center.1]
            .iter()
            .map(|x| x.magnitude().unsigned_abs() as u32)
            .max()
            .unwrap_or(0);
    let s = Interval::from_int(n.clone(), prec).sqrt();
    let det = Interval::point(t.det(), prec);
    // Half-widths √(Σᵢᵢ) with Σ = D⁻¹ = adj(D)/det.
    let hx = Interval::point(t.d.clone(), prec).div(&det).expect("det > 0").sqrt().mul(&s);
    let hy = Interval::point(t.a.clone(), prec).div(&det).expect("det > 0").sqrt().mul(&s);
    let cx = Interval::point(t.center.0.clone(), prec).mul(&s);
    let cy = Interval::point(t.center.1.clone(), prec).mul(&s);
    let (c, h, axis) = if hy.upper() <= hx.upper() { (cy, hy, 1) } else { (cx, hx, 0) };
    let lo = c.sub(&h).lower().ceil();
    let hi = c.add(&h).upper().floor();
    (lo, hi, axis)
}

/// All least-terms points of `region` at exponent `exp`, in raster order.
pub fn enumerate_level<R: ConvexRegion + ?Sized>(
    region: &R,
    exp: DenominatorExponent,
    g: &GridOperator,
) -> Vec<ScaledGaussian> {
    let e = region.enclosing_ellipse();
    LevelEnumerator::new(region, &e, g, exp).collect()
}

/// Unbounded stream of candidates ordered by increasing `(k, l)`, with `l`
/// restricted to `l_values`.
pub struct CandidateStream<'a, R: ?Sized> {
    region: &'a R,
    ellipse: Ellipse,
    grid: GridOperator,
    l_values: Vec<u32>,
    k: u32,
    l_index: usize,
    current: Option<LevelEnumerator<'a, R>>,
    levels_started: u64,
}

impl<'a, R: ConvexRegion + ?Sized> CandidateStream<'a, R> {
    pub fn new(region: &'a R, l_values: &[u32]) -> Self {
        let ellipse = region.enclosing_ellipse();
        let (grid, _) = make_upright(&ellipse);
        let mut l_values = l_values.to_vec();
        l_values.sort_unstable();
        l_values.dedup();
        assert!(!l_values.is_empty(), "at least one √2 exponent is required");
        CandidateStream {
            region,
            ellipse,
            grid,
            l_values,
            k: 0,
            l_index: 0,
            current: None,
            levels_started: 0,
        }
    }

    pub fn grid_operator(&self) -> &GridOperator {
        &self.grid
    }

    pub fn levels_started(&self) -> u64 {
        self.levels_started
    }

    /// Exponent of the level being enumerated, if one has started.
    pub fn current_level(&self) -> Option<DenominatorExponent> {
        self.current.as_ref().map(|c| c.exponent())
    }

    fn start_next_level(&mut self) {
        let exp = DenominatorExponent::new(self.k, self.l_values[self.l_index]);
        self.l_index += 1;
        if self.l_index == self.l_values.len() {
            self.l_index = 0;
            self.k += 1;
        }
        self.levels_started += 1;
        self.current = Some(LevelEnumerator::new(self.region, &self.ellipse, &self.grid, exp));
    }
}

impl<R: ConvexRegion + ?Sized> Iterator for CandidateStream<'_, R> {
    type Item = ScaledGaussian;

    fn next(&mut self) -> Option<ScaledGaussian> {
        loop {
            if let Some(level) = self.current.as_mut() {
                if let Some(x) = level.next() {
                    return Some(x);
                }
            }
            if self.k == u32::MAX {
                return None;
            }
            self.start_next_level();
        }
    }
}

pub fn candidate_stream<'a, R: ConvexRegion + ?Sized>(
    region: &'a R,
    l_values: &[u32],
) -> CandidateStream<'a, R> {
    CandidateStream::new(region, l_values)
}
