//! Approximate synthesis of `R_z(θ)`: candidates from the ε-region, a `β`
//! from the Diophantine solver, then exact synthesis of the resulting unitary.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dioph::{solve_beta, BetaFailure, Effort, FactoringBackend};
use crate::error::{Error, Result};
use crate::exact::{evaluate, Circuit, GateSet};
use crate::expr::Expr;
use crate::real::{Dyadic, Interval};
use crate::region::{candidate_stream, EpsilonRegion};
use crate::ring::{ExactUnitary, GaussianInteger};

pub const DEFAULT_CANDIDATE_CAP: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct SynthesisRequest {
    pub theta: Expr,
    pub epsilon: BigRational,
    pub gate_set: GateSet,
    pub effort: Effort,
    pub seed: u64,
    /// Working precision in bits; `None` derives it from `epsilon`.
    pub precision: Option<u32>,
    pub candidate_cap: u64,
}

impl SynthesisRequest {
    pub fn new(theta: Expr, epsilon: BigRational) -> Self {
        SynthesisRequest {
            theta,
            epsilon,
            gate_set: GateSet::default(),
            effort: Effort::default(),
            seed: 0,
            precision: None,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }

    /// Parses `theta` as an angle expression and `epsilon` as a positive rational.
    pub fn parse(theta: &str, epsilon: &str) -> Result<Self> {
        Ok(SynthesisRequest::new(theta.parse()?, crate::expr::parse_epsilon(epsilon)?))
    }

    pub fn gate_set(mut self, g: GateSet) -> Self {
        self.gate_set = g;
        self
    }

    pub fn effort(mut self, e: Effort) -> Self {
        self.effort = e;
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn precision(mut self, p: Option<u32>) -> Self {
        self.precision = p;
        self
    }

    pub fn candidate_cap(mut self, cap: u64) -> Self {
        self.candidate_cap = cap;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SynthesisStats {
    pub candidates_examined: u64,
    pub levels_visited: u64,
    pub no_solution: u64,
    pub unfactored: u64,
    pub elapsed: Duration,
}

impl SynthesisStats {
    fn record(&mut self, reason: BetaFailure) {
        match reason {
            BetaFailure::NoSolution => self.no_solution += 1,
            BetaFailure::Unfactored => self.unfactored += 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    pub unitary: ExactUnitary,
    pub v_count: u32,
    /// Upper bound on `‖U − R_z(θ)‖`, rounded up, never above `ε`.
    pub error_bound: String,
    pub error_interval: Interval,
    pub stats: SynthesisStats,
}

pub fn synthesize(req: &SynthesisRequest) -> Result<SynthesisResult> {
    synthesize_with(req, &req.effort)
}

/// Like [`synthesize`] with an explicit factoring backend.
pub fn synthesize_with(req: &SynthesisRequest, backend: &dyn FactoringBackend) -> Result<SynthesisResult> {
    let start = Instant::now();
    let region = EpsilonRegion::new(req.theta.clone(), req.epsilon.clone(), req.precision)?;
    let l_values: &[u32] = match req.gate_set {
        GateSet::CliffordV => &[0, 1, 2],
        GateSet::PauliV => &[0],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let mut stats = SynthesisStats::default();
    let mut stream = candidate_stream(&region, l_values);
    loop {
        if stats.candidates_examined >= req.candidate_cap {
            return Err(Error::Diverged {
                candidates: stats.candidates_examined,
            });
        }
        let candidate = stream
            .next()
            .ok_or_else(|| Error::InvariantViolation("candidate stream ended".into()))?;
        stats.candidates_examined += 1;
        stats.levels_visited = stream.levels_started();
        let beta = match solve_beta(&candidate.num, candidate.exp, backend, &mut rng)? {
            Ok(beta) => beta,
            Err(reason) => {
                stats.record(reason);
                continue;
            }
        };
        let unitary = ExactUnitary::from_columns_det_one(&candidate.num, &beta, candidate.exp)?;
        let circuit = req.gate_set.synthesize(&unitary)?;
        let (error_bound, error_interval) = certified_bound(&region, &unitary)?;
        stats.elapsed = start.elapsed();
        return Ok(SynthesisResult {
            v_count: circuit.v_count() as u32,
            circuit,
            unitary,
            error_bound,
            error_interval,
            stats,
        });
    }
}

/// Decimal upper bound on the distance of a region member, at most `ε`.
///
/// The region test already certified `‖U − R_z(θ)‖ ≤ ε`; when interval
/// evaluation cannot separate the distance from `ε` (the boundary case), the
/// bound reported is `ε` itself.
fn certified_bound(region: &EpsilonRegion, u: &ExactUnitary) -> Result<(String, Interval)> {
    let eps = region.epsilon();
    let mut prec = region.precision() + 64;
    let mut best = None;
    for _ in 0..4 {
        let d = det_one_distance(&u.a, &u.exp.squared_denominator(), &region.theta().clone(), prec)?;
        if d.upper().to_rational() <= *eps {
            best = Some(d);
            break;
        }
        prec *= 2;
    }
    let Some(d) = best else {
        let hi = Interval::from_rational(eps, prec);
        let iv = Interval::new(Dyadic::zero(), hi.upper().clone(), prec);
        return Ok((decimal_not_above(eps, &iv), iv));
    };
    Ok((decimal_not_above(eps, &d), d))
}

/// The upper endpoint of `d` rounded up to a decimal, using as many digits as
/// needed to stay at or below `eps`; falls back to `eps` when it terminates.
fn decimal_not_above(eps: &BigRational, d: &Interval) -> String {
    let mut last = String::new();
    for digits in [20, 40, 80, 160, 320] {
        let s = d.upper_decimal(digits);
        match crate::expr::parse_epsilon(&s).ok().or_else(|| (s == "0").then(|| BigRational::from_integer(0.into()))) {
            Some(v) if v <= *eps => return s,
            _ => last = s,
        }
    }
    exact_decimal(eps).unwrap_or(last)
}

fn exact_decimal(r: &BigRational) -> Option<String> {
    let mut den = r.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&den % &two) == BigInt::from(0) {
        den /= &two;
        twos += 1;
    }
    while (&den % &five) == BigInt::from(0) {
        den /= &five;
        fives += 1;
    }
    if den != BigInt::from(1) {
        return None;
    }
    let places = twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().to_string();
    if places == 0 {
        return Some(digits);
    }
    Some(format!("{digits}e-{places}"))
}

/// `√(2 − 2·z·α/√N)` with `z = e^{−iθ/2}`, valid for `[[α, −β†], [β, α†]]/√N`.
fn det_one_distance(alpha: &GaussianInteger, n: &BigInt, theta: &Expr, prec: u32) -> Result<Interval> {
    let (s, c) = theta.eval(prec + 16)?.mul_pow2(-1).sin_cos();
    let (s, c) = (s.with_prec(prec), c.with_prec(prec));
    let dot = c.mul_int(&alpha.re).sub(&s.mul_int(&alpha.im));
    let root = Interval::from_int(n.clone(), prec).sqrt();
    let ratio = dot.div(&root).expect("N > 0");
    Ok(Interval::from_int(2, prec).sub(&ratio.mul_pow2(1)).sqrt())
}

/// Rigorous enclosure of `‖U − R_z(θ)‖` for an exactly represented `U`.
pub fn distance(u: &ExactUnitary, theta: &Expr, prec: u32) -> Result<Interval> {
    let n = u.exp.squared_denominator();
    if u.has_det_one_form() {
        return det_one_distance(&u.a, &n, theta, prec);
    }
    // Largest singular value of M = U − R_z(θ):
    // σ² = (F + √(F² − 4|det M|²))/2 with F the squared Frobenius norm.
    let (s, c) = theta.eval(prec + 16)?.mul_pow2(-1).sin_cos();
    let (s, c) = (s.with_prec(prec), c.with_prec(prec));
    let root = Interval::from_int(n, prec).sqrt();
    let entry = |g: &GaussianInteger| {
        (
            Interval::from_int(g.re.clone(), prec).div(&root).expect("N > 0"),
            Interval::from_int(g.im.clone(), prec).div(&root).expect("N > 0"),
        )
    };
    let (ar, ai) = entry(&u.a);
    let (br, bi) = entry(&u.b);
    let (cr, ci) = entry(&u.c);
    let (dr, di) = entry(&u.d);
    // R_z(θ) = diag(c − is, c + is).
    let (ar, ai) = (ar.sub(&c), ai.add(&s));
    let (dr, di) = (dr.sub(&c), di.sub(&s));
    let frob = [&ar, &ai, &br, &bi, &cr, &ci, &dr, &di]
        .iter()
        .fold(Interval::zero(prec), |acc, x| acc.add(&x.square()));
    let det_r = ar.mul(&dr).sub(&ai.mul(&di)).sub(&br.mul(&cr).sub(&bi.mul(&ci)));
    let det_i = ar.mul(&di).add(&ai.mul(&dr)).sub(&br.mul(&ci).add(&bi.mul(&cr)));
    let det2 = det_r.square().add(&det_i.square());
    let disc = frob.square().sub(&det2.mul_pow2(2)).sqrt();
    Ok(frob.add(&disc).mul_pow2(-1).sqrt())
}

/// Rigorous upper-bound enclosure of `‖evaluate(circuit) − R_z(θ)‖` at `prec` bits.
pub fn verify(circuit: &Circuit, theta: &Expr, prec: u32) -> Result<Interval> {
    distance(&evaluate(circuit), theta, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Gate;

    const TWO_ATAN_TWO: &str =
        "2.214297435588181006034130920357074080140095290802865293353078414867420677954725588026834";

    fn req(theta: &str, eps: &str) -> SynthesisRequest {
        SynthesisRequest::parse(theta, eps).unwrap()
    }

    #[test]
    fn zero_angle_gives_identity() {
        for eps in ["1e-3", "0.5", "1e-12"] {
            let r = synthesize(&req("0", eps)).unwrap();
            assert!(r.circuit.is_empty(), "{}", r.circuit);
            assert_eq!(r.v_count, 0);
            assert_eq!(r.error_bound, "0");
        }
    }

    #[test]
    fn large_epsilon_gives_clifford() {
        for theta in ["1.0", "pi/3", "-2.9", "0.77"] {
            let r = synthesize(&req(theta, "0.766")).unwrap();
            assert_eq!(r.v_count, 0, "θ={theta}");
        }
    }

    #[test]
    fn result_invariants() {
        let r = synthesize(&req("pi/7", "1e-4")).unwrap();
        assert_eq!(evaluate(&r.circuit), r.unitary);
        assert_eq!(r.v_count, r.unitary.sqrt5_exponent());
        assert!(r.unitary.has_det_one_form());
        assert_eq!(r.unitary.det_power_of_i(), Some(0));
        let eps = crate::expr::parse_epsilon("1e-4").unwrap();
        assert!(parse_bound(&r.error_bound) <= eps);
        let v = verify(&r.circuit, &"pi/7".parse().unwrap(), 256).unwrap();
        assert!(v.upper().to_rational() <= eps);
        assert!(r.stats.candidates_examined >= 1);
        assert!(r.stats.levels_visited >= 1);
    }

    fn parse_bound(s: &str) -> BigRational {
        if s == "0" {
            BigRational::from_integer(0.into())
        } else {
            crate::expr::parse_epsilon(s).unwrap()
        }
    }

    #[test]
    fn pauli_mode_avoids_cliffords() {
        let r = synthesize(&req("0.3", "1e-3").gate_set(GateSet::PauliV)).unwrap();
        assert_eq!(r.unitary.exp.l, 0);
        assert!(r.circuit.is_pauli_v());
        assert!(r
            .circuit
            .gates()
            .iter()
            .all(|g| !matches!(g, Gate::H | Gate::S | Gate::Sd | Gate::W)));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = synthesize(&req("1.234", "1e-6").seed(3)).unwrap();
        let b = synthesize(&req("1.234", "1e-6").seed(3)).unwrap();
        assert_eq!(a.circuit, b.circuit);
    }

    #[test]
    fn cap_reports_divergence() {
        let err = synthesize(&req("1.234", "1e-8").candidate_cap(1)).unwrap_err();
        assert_eq!(err, Error::Diverged { candidates: 1 });
    }

    #[test]
    fn verify_examples() {
        let empty = Circuit::empty();
        let v = verify(&empty, &"0".parse().unwrap(), 128).unwrap();
        assert!(v.upper().is_zero());
        // V_Z = R_z(−2·atan 2), so VZd matches the positive angle exactly.
        let theta: Expr = TWO_ATAN_TWO.parse().unwrap();
        let d = verify(&"VZd".parse().unwrap(), &theta, 256).unwrap();
        assert!(d.upper().to_f64() < 1e-30, "{d}");
        let d = verify(&"VZ".parse().unwrap(), &Expr::Neg(Box::new(theta.clone())), 256).unwrap();
        assert!(d.upper().to_f64() < 1e-30, "{d}");
        let d = verify(&"VZ".parse().unwrap(), &theta, 256).unwrap();
        assert!((d.to_f64() - 4.0 / 5f64.sqrt()).abs() < 1e-12, "{d}");
    }

    #[test]
    fn general_bound_matches_closed_form() {
        // VZ VZd is the identity, whose distance to R_z(θ) is |1 − e^{iθ/2}|.
        for theta in [0.3f64, 1.7, -2.2] {
            let t: Expr = format!("{theta}").parse().unwrap();
            let d = verify(&"VZ VZd".parse().unwrap(), &t, 128).unwrap().to_f64();
            let want = 2.0 * (theta / 4.0).sin().abs();
            assert!((d - want).abs() < 1e-12);
        }
        // W has determinant i, so the general bound is used.
        let d = verify(&"W".parse().unwrap(), &"0".parse().unwrap(), 128).unwrap().to_f64();
        let w = std::f64::consts::FRAC_PI_4;
        assert!((d - ((w.cos() - 1.0).powi(2) + w.sin().powi(2)).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn exact_decimals() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(exact_decimal(&q(1, 1000)).as_deref(), Some("1e-3"));
        assert_eq!(exact_decimal(&q(3, 8)).as_deref(), Some("375e-3"));
        assert_eq!(exact_decimal(&q(1, 3)), None);
    }
}
