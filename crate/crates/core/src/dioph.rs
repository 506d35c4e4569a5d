//! Solving `β†β = n` over the Gaussian integers: primality, factoring under
//! an effort policy, Euler's criterion, and two-squares decomposition.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, RandBigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ring::{DenominatorExponent, GaussianInteger};

/// Miller–Rabin rounds; a composite passes all of them with probability < 4⁻⁶⁴.
const MR_ROUNDS: usize = 64;
const SMALL_PRIME_LIMIT: u32 = 1 << 12;

fn small_primes() -> &'static [u32] {
    static P: OnceLock<Vec<u32>> = OnceLock::new();
    P.get_or_init(|| {
        let n = SMALL_PRIME_LIMIT as usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i < n {
            if sieve[i] {
                let mut j = i * i;
                while j < n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..n as u32).filter(|&i| sieve[i as usize]).collect()
    })
}

const FIXED_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Below this bound Miller–Rabin with [`FIXED_BASES`] is exact.
const DETERMINISTIC_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

/// Probabilistic primality: small-prime screen, then Miller–Rabin with the
/// first twelve primes as bases (exact below 3.3·10²⁴) and, above that, further
/// bases drawn from a generator seeded by `n`, so the answer is reproducible.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    if n < &BigInt::from(2) {
        return false;
    }
    for &p in small_primes().iter().take(168) {
        let p = BigInt::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().expect("n > 1");
    let d = &n1 >> s;
    let witness = |a: &BigInt| -> bool {
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            return false;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                return false;
            }
            if x == one {
                return true;
            }
        }
        true
    };
    if FIXED_BASES.iter().any(|&a| witness(&BigInt::from(a))) {
        return false;
    }
    if n.to_u128().is_some_and(|m| m < DETERMINISTIC_BOUND) {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(fold_u64(n));
    let two = BigInt::from(2);
    let hi = n - &one;
    for _ in FIXED_BASES.len()..MR_ROUNDS {
        let a = rng.gen_bigint_range(&two, &hi);
        if witness(&a) {
            return false;
        }
    }
    true
}

fn mulmod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    b %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, n);
        }
        b = mulmod(b, b, n);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in small_primes().iter().take(168) {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &FIXED_BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn fold_u64(n: &BigInt) -> u64 {
    n.iter_u64_digits()
        .fold(0x9e37_79b9_7f4a_7c15, |h, d| (h ^ d).wrapping_mul(0x100_0000_01b3).rotate_left(17))
}

/// How hard factoring may try.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Effort {
    /// Extract powers of two and test the odd part for primality.
    #[default]
    FastPathOnly,
    /// Trial division and Pollard–Brent rho within a budget of modular
    /// multiplications.
    Bounded(u64),
    /// Run until the factorization is complete.
    Complete,
}

impl fmt::Display for Effort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effort::FastPathOnly => f.write_str("fast"),
            Effort::Bounded(b) => write!(f, "bounded:{b}"),
            Effort::Complete => f.write_str("complete"),
        }
    }
}

impl FromStr for Effort {
    type Err = Error;

    fn from_str(s: &str) -> Result<Effort> {
        match s {
            "fast" | "fast_path_only" => Ok(Effort::FastPathOnly),
            "complete" => Ok(Effort::Complete),
            _ => s
                .strip_prefix("bounded:")
                .and_then(|b| b.parse().ok())
                .map(Effort::Bounded)
                .ok_or_else(|| Error::Parse(format!("unknown effort `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorStatus {
    Complete,
    Partial,
}

/// `n = Π pᵢ^eᵢ · cofactor` with every listed `pᵢ` a probable prime.
///
/// `n = 0` is represented with no factors and cofactor 0, and counts as
/// complete.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub n: BigInt,
    pub factors: Vec<(BigInt, u32)>,
    pub cofactor: BigInt,
}

impl Factorization {
    fn new(n: BigInt, mut primes: Vec<BigInt>, cofactor: BigInt) -> Self {
        primes.sort();
        let mut factors: Vec<(BigInt, u32)> = Vec::new();
        for p in primes {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
        Factorization {
            n,
            factors,
            cofactor,
        }
    }

    pub fn status(&self) -> FactorStatus {
        if self.cofactor.is_one() || self.n.is_zero() {
            FactorStatus::Complete
        } else {
            FactorStatus::Partial
        }
    }

    pub fn is_complete(&self) -> bool {
        self.status() == FactorStatus::Complete
    }

    /// `Π pᵢ^eᵢ · cofactor`.
    pub fn product(&self) -> BigInt {
        self.factors
            .iter()
            .fold(self.cofactor.clone(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.n)?;
        for (i, (p, e)) in self.factors.iter().enumerate() {
            let sep = if i == 0 { " " } else { " · " };
            if *e == 1 {
                write!(f, "{sep}{p}")?;
            } else {
                write!(f, "{sep}{p}^{e}")?;
            }
        }
        if !self.cofactor.is_one() || self.factors.is_empty() {
            let sep = if self.factors.is_empty() { " " } else { " · " };
            write!(f, "{sep}[{}]", self.cofactor)?;
        }
        Ok(())
    }
}

/// A source of (possibly partial) factorizations.
pub trait FactoringBackend: Send + Sync {
    fn name(&self) -> String;

    fn factor(&self, n: &BigInt, rng: &mut ChaCha8Rng) -> Result<Factorization>;
}

impl FactoringBackend for Effort {
    fn name(&self) -> String {
        self.to_string()
    }

    fn factor(&self, n: &BigInt, rng: &mut ChaCha8Rng) -> Result<Factorization> {
        factor(n, *self, rng)
    }
}

/// Factors `n ≥ 0` under the given effort policy.
pub fn factor(n: &BigInt, effort: Effort, rng: &mut ChaCha8Rng) -> Result<Factorization> {
    if n.is_negative() {
        return Err(Error::InvalidArgument(format!("cannot factor {n}")));
    }
    if n.is_zero() {
        return Ok(Factorization::new(n.clone(), Vec::new(), BigInt::zero()));
    }
    let mut primes = Vec::new();
    let twos = n.trailing_zeros().unwrap_or(0);
    primes.extend(std::iter::repeat_n(BigInt::from(2), twos as usize));
    let mut m = n >> twos;

    let budget = match effort {
        Effort::FastPathOnly => {
            let cofactor = if m.is_one() || is_probable_prime(&m) {
                if !m.is_one() {
                    primes.push(m);
                }
                BigInt::one()
            } else {
                m
            };
            return Ok(Factorization::new(n.clone(), primes, cofactor));
        }
        Effort::Bounded(b) => Some(b),
        Effort::Complete => None,
    };
    let mut budget = budget;

    if let Some(small) = m.to_u64() {
        let (small_primes, cofactor) = factor_u64(small, &mut budget, rng);
        primes.extend(small_primes.into_iter().map(BigInt::from));
        return Ok(Factorization::new(n.clone(), primes, BigInt::from(cofactor)));
    }
    for &p in small_primes().iter().skip(1) {
        if m.is_one() {
            break;
        }
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        spend(&mut budget, 1);
        while (&m % &pb).is_zero() {
            m /= &pb;
            primes.push(pb.clone());
        }
        if budget == Some(0) {
            break;
        }
    }

    let mut cofactor = BigInt::one();
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if is_probable_prime(&c) {
            primes.push(c);
            continue;
        }
        if let Some(r) = exact_sqrt(&c) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        match pollard_brent(&c, rng, &mut budget) {
            Some(d) => {
                let e = &c / &d;
                stack.push(d);
                stack.push(e);
            }
            None => cofactor *= c,
        }
    }
    Ok(Factorization::new(n.clone(), primes, cofactor))
}

fn factor_u64(mut m: u64, budget: &mut Option<u64>, rng: &mut ChaCha8Rng) -> (Vec<u64>, u64) {
    let mut primes = Vec::new();
    for &p in small_primes().iter().skip(1) {
        let p = p as u64;
        if m == 1 || p * p > m {
            break;
        }
        spend(budget, 1);
        while m.is_multiple_of(p) {
            m /= p;
            primes.push(p);
        }
        if *budget == Some(0) {
            break;
        }
    }
    let mut cofactor = 1;
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_prime_u64(c) {
            primes.push(c);
            continue;
        }
        let r = c.isqrt();
        if r * r == c {
            stack.extend([r, r]);
            continue;
        }
        match pollard_brent_u64(c, rng, budget) {
            Some(d) => stack.extend([d, c / d]),
            None => cofactor *= c,
        }
    }
    (primes, cofactor)
}

fn spend(budget: &mut Option<u64>, units: u64) -> bool {
    match budget {
        None => true,
        Some(b) if *b >= units => {
            *b -= units;
            true
        }
        Some(b) => {
            *b = 0;
            false
        }
    }
}

fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// A nontrivial factor of the odd composite `n`, or `None` when the budget
/// runs out.
fn pollard_brent(n: &BigInt, rng: &mut ChaCha8Rng, budget: &mut Option<u64>) -> Option<BigInt> {
    let one = BigInt::one();
    loop {
        let c = rng.gen_bigint_range(&one, n);
        let mut y = rng.gen_bigint_range(&BigInt::zero(), n);
        let f = |x: &BigInt| (x * x + &c) % n;
        let m = 128u64;
        let (mut g, mut r, mut q) = (one.clone(), 1u64, one.clone());
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            if !spend(budget, r) {
                return None;
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    q = q * (&x - &y).abs() % n;
                }
                if !spend(budget, 2 * steps) {
                    return None;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                if !spend(budget, 1) {
                    return None;
                }
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
}

fn pollard_brent_u64(n: u64, rng: &mut ChaCha8Rng, budget: &mut Option<u64>) -> Option<u64> {
    let mulmod = |a: u64, b: u64| mulmod(a, b, n);
    loop {
        let c = rng.gen_range(1..n);
        let f = |x: u64| ((mulmod(x, x) as u128 + c as u128) % n as u128) as u64;
        let mut y = rng.gen_range(0..n);
        let m = 128u64;
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            if !spend(budget, r) {
                return None;
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mulmod(q, x.abs_diff(y));
                }
                if !spend(budget, 2 * steps) {
                    return None;
                }
                g = q.gcd(&n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                if !spend(budget, 1) {
                    return None;
                }
                g = x.abs_diff(ys).gcd(&n);
                if g != 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
}

/// Euler's criterion: `n` is a sum of two squares iff every prime `≡ 3 (mod 4)`
/// divides it to an even power.
pub fn euler_representable(f: &Factorization) -> Result<bool> {
    require_complete(f)?;
    let four = BigInt::from(4);
    Ok(f
        .factors
        .iter()
        .all(|(p, e)| e % 2 == 0 || p.mod_floor(&four) != BigInt::from(3)))
}

fn require_complete(f: &Factorization) -> Result<()> {
    if f.is_complete() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "factorization of {} is partial (cofactor {})",
            f.n, f.cofactor
        )))
    }
}

/// Some `x` with `x² ≡ −1 (mod p)` for a prime `p ≡ 1 (mod 4)`.
pub fn sqrt_minus_one_mod(p: &BigInt, rng: &mut ChaCha8Rng) -> Result<BigInt> {
    let four = BigInt::from(4);
    if p.mod_floor(&four) != BigInt::one() {
        return Err(Error::Precondition(format!("{p} is not 1 mod 4")));
    }
    let e = (p - 1u32) / &four;
    let minus_one = p - 1u32;
    let two = BigInt::from(2);
    for _ in 0..256 {
        let t = rng.gen_bigint_range(&two, &(p - 1u32).max(BigInt::from(3)));
        let x = t.modpow(&e, p);
        if (&x * &x).mod_floor(p) == minus_one {
            return Ok(x);
        }
    }
    Err(Error::Precondition(format!("{p} does not behave like a prime")))
}

/// The Gaussian prime over `p ≡ 1 (mod 4)`, normalized to `a + bi` with `a > b > 0`.
fn gaussian_prime_over(p: &BigInt, rng: &mut ChaCha8Rng) -> Result<GaussianInteger> {
    let x = sqrt_minus_one_mod(p, rng)?;
    let g = GaussianInteger {
        re: p.clone(),
        im: BigInt::zero(),
    }
    .gcd(&GaussianInteger { re: x, im: BigInt::one() });
    if g.norm() != *p {
        return Err(Error::InvariantViolation(format!("gcd did not split {p}")));
    }
    let (a, b) = (g.re.abs(), g.im.abs());
    let (a, b) = if a > b { (a, b) } else { (b, a) };
    Ok(GaussianInteger { re: a, im: b })
}

/// `β` with `β†β = n`, read off as `(b, c) = (Re β, Im β)`, or `None` when `n`
/// is not a sum of two squares. The witness is canonical: it does not depend
/// on the random choices made along the way.
pub fn two_squares(f: &Factorization, rng: &mut ChaCha8Rng) -> Result<Option<GaussianInteger>> {
    require_complete(f)?;
    if f.n.is_zero() {
        return Ok(Some(GaussianInteger::zero()));
    }
    if !euler_representable(f)? {
        return Ok(None);
    }
    let four = BigInt::from(4);
    let mut beta = GaussianInteger::one();
    for (p, e) in &f.factors {
        let factor = if *p == BigInt::from(2) {
            GaussianInteger::new(1, 1).pow(*e)
        } else if p.mod_floor(&four) == BigInt::from(3) {
            GaussianInteger {
                re: num_traits::pow(p.clone(), (*e / 2) as usize),
                im: BigInt::zero(),
            }
        } else {
            gaussian_prime_over(p, rng)?.pow(*e)
        };
        beta = &beta * &factor;
    }
    Ok(Some(beta))
}

/// Why no `β` was produced for a candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BetaFailure {
    /// `n` is provably not a sum of two squares.
    NoSolution,
    /// The backend could not factor `n`.
    Unfactored,
}

impl fmt::Display for BetaFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaFailure::NoSolution => "no_solution",
            BetaFailure::Unfactored => "unfactored",
        })
    }
}

/// `β` with `|α|² + |β|² = 5^k·2^l`.
pub fn solve_beta(
    alpha: &GaussianInteger,
    exp: DenominatorExponent,
    backend: &dyn FactoringBackend,
    rng: &mut ChaCha8Rng,
) -> Result<std::result::Result<GaussianInteger, BetaFailure>> {
    let n = exp.squared_denominator() - alpha.norm();
    if n.sign() == Sign::Minus {
        return Err(Error::Precondition(format!(
            "|{alpha}|² exceeds 5^{}·2^{}",
            exp.k, exp.l
        )));
    }
    if n.is_zero() {
        return Ok(Ok(GaussianInteger::zero()));
    }
    // An odd part ≡ 3 (mod 4) always hides a prime ≡ 3 (mod 4) to an odd power.
    let odd = &n >> n.trailing_zeros().unwrap_or(0);
    if odd.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
        return Ok(Err(BetaFailure::NoSolution));
    }
    let f = backend.factor(&n, rng)?;
    if !f.is_complete() {
        return Ok(Err(BetaFailure::Unfactored));
    }
    Ok(two_squares(&f, rng)?.ok_or(BetaFailure::NoSolution))
}
