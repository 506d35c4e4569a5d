use std::fmt;

use super::gate::{Circuit, Gate};
use super::groups::{pauli_group, pauli_s_group};
use crate::error::{Error, Result};
use crate::ring::{reduce_in_place, residues_mod5, DenominatorExponent, ExactUnitary, GaussianInteger};

/// A unit vector `(1/√5^k)(1/√2^l)·(α, γ)ᵀ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ColumnState {
    pub alpha: GaussianInteger,
    pub gamma: GaussianInteger,
    pub exp: DenominatorExponent,
}

impl ColumnState {
    /// Checks the unit-norm identity and reduces to least terms.
    pub fn new(alpha: GaussianInteger, gamma: GaussianInteger, exp: DenominatorExponent) -> Result<Self> {
        if alpha.norm() + gamma.norm() != exp.squared_denominator() {
            return Err(Error::InvariantViolation(format!(
                "column ({alpha}, {gamma}) at {exp} is not a unit vector"
            )));
        }
        let mut s = ColumnState { alpha, gamma, exp };
        s.reduce();
        Ok(s)
    }

    pub fn e1() -> Self {
        ColumnState {
            alpha: GaussianInteger::one(),
            gamma: GaussianInteger::zero(),
            exp: DenominatorExponent::default(),
        }
    }

    /// First column of `u`.
    pub fn first_column(u: &ExactUnitary) -> Self {
        let mut s = ColumnState {
            alpha: u.a.clone(),
            gamma: u.c.clone(),
            exp: u.exp,
        };
        s.reduce();
        s
    }

    fn reduce(&mut self) {
        let mut entries = [std::mem::take(&mut self.alpha), std::mem::take(&mut self.gamma)];
        reduce_in_place(&mut entries, &mut self.exp);
        let [alpha, gamma] = entries;
        self.alpha = alpha;
        self.gamma = gamma;
    }

    /// `m·u`, reduced, with no bound on the resulting `l`.
    fn times(&self, m: &ExactUnitary) -> ColumnState {
        let mut s = ColumnState {
            alpha: &(&m.a * &self.alpha) + &(&m.b * &self.gamma),
            gamma: &(&m.c * &self.alpha) + &(&m.d * &self.gamma),
            exp: DenominatorExponent::new(self.exp.k + m.exp.k, self.exp.l + m.exp.l),
        };
        s.reduce();
        s
    }

    /// Balanced residues `(a, b, c, d)` of `α = a + bi`, `γ = c + di` mod 5.
    pub fn residues(&self) -> [i8; 4] {
        let (a, b) = residues_mod5(&self.alpha);
        let (c, d) = residues_mod5(&self.gamma);
        [a, b, c, d]
    }
}

impl fmt::Display for ColumnState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) / [{}]", self.alpha, self.gamma, self.exp)
    }
}

/// Exact `g·u` in least terms.
pub fn apply_gate(g: Gate, u: &ColumnState) -> Result<ColumnState> {
    let out = u.times(g.matrix());
    if !out.exp.is_public() {
        return Err(Error::InvariantViolation(format!(
            "applying {g} to {u} left √2 exponent {}",
            out.exp.l
        )));
    }
    Ok(out)
}

fn apply_word(word: &[Gate], u: &ColumnState) -> ColumnState {
    word.iter().rev().fold(u.clone(), |s, g| s.times(g.matrix()))
}

/// Finds a Clifford word taking `u` to `√2` exponent 0. The word is a
/// Pauli+S element followed by `H` or `ω` (when `l = 1`) or by `H·ω`
/// (when `l = 2`); the Pauli+S part is found by exhaustive search.
pub fn reduce_sqrt2(u: &ColumnState) -> Result<(Circuit, ColumnState)> {
    let finishers: &[&[Gate]] = match u.exp.l {
        0 => return Ok((Circuit::empty(), u.clone())),
        1 => &[&[Gate::H], &[Gate::W]],
        2 => &[&[Gate::H, Gate::W]],
        l => {
            return Err(Error::InvariantViolation(format!(
                "column has √2 exponent {l}"
            )))
        }
    };
    for (p, pw) in pauli_s_group().iter() {
        let v = u.times(p);
        for fin in finishers {
            let w = apply_word(fin, &v);
            if w.exp.l == 0 {
                debug_assert_eq!(w.exp.k, u.exp.k);
                let mut word = fin.to_vec();
                word.extend_from_slice(pw);
                return Ok((Circuit::new(word), w));
            }
        }
    }
    Err(Error::InvariantViolation(format!(
        "no Pauli+S normalization reduces {u}"
    )))
}

/// Residue patterns with `a ≡ 2` and one nonzero residue among `b, c, d`.
const SINGLE_TABLE: [([i8; 4], Gate); 6] = [
    ([2, 1, 0, 0], Gate::VZ),
    ([2, 0, 1, 0], Gate::VYd),
    ([2, 0, 0, 1], Gate::VX),
    ([2, -1, 0, 0], Gate::VZd),
    ([2, 0, -1, 0], Gate::VY),
    ([2, 0, 0, -1], Gate::VXd),
];

/// Residue patterns with every residue nonzero, `a ≡ 2` and `c > 0`.
const FULL_TABLE: [([i8; 4], Gate); 12] = [
    ([2, 2, 1, 1], Gate::VYd),
    ([2, 1, 2, 1], Gate::VX),
    ([2, 1, 1, 2], Gate::VZ),
    ([2, 1, 2, -1], Gate::VZ),
    ([2, -1, 2, 1], Gate::VZd),
    ([2, 2, 1, -1], Gate::VXd),
    ([2, -2, 1, 1], Gate::VX),
    ([2, 1, 1, -2], Gate::VYd),
    ([2, -1, 1, 2], Gate::VYd),
    ([2, -1, 1, -2], Gate::VZd),
    ([2, -1, 2, -1], Gate::VXd),
    ([2, -2, 1, -1], Gate::VYd),
];

/// The V gate tabulated for a normalized residue pattern.
pub fn table_lookup(residues: [i8; 4]) -> Option<Gate> {
    SINGLE_TABLE
        .iter()
        .chain(FULL_TABLE.iter())
        .find(|(key, _)| *key == residues)
        .map(|&(_, g)| g)
}

/// One `√5` reduction: a Pauli normalization `P` and a tabulated `V` with
/// `V·P·u` at `√5` exponent one lower. Requires `l = 0` and `k > 0`.
pub fn reduce_sqrt5_step(u: &ColumnState) -> Result<(Circuit, ColumnState)> {
    if u.exp.l != 0 || u.exp.k == 0 {
        return Err(Error::Precondition(format!(
            "√5 reduction needs l = 0 and k > 0, got {}",
            u.exp
        )));
    }
    for (p, pw) in pauli_group().iter() {
        let v = u.times(p);
        if let Some(g) = table_lookup(v.residues()) {
            let w = v.times(g.matrix());
            if w.exp.k + 1 != u.exp.k || w.exp.l != 0 {
                return Err(Error::InvariantViolation(format!(
                    "{g} did not lower the √5 exponent of {u}"
                )));
            }
            let mut word = vec![g];
            word.extend_from_slice(pw);
            return Ok((Circuit::new(word), w));
        }
    }
    Err(Error::InvariantViolation(format!(
        "residues of {u} match no reduction table entry"
    )))
}

/// A Pauli word taking a `k = l = 0` column to `e₁`.
pub(crate) fn pauli_to_e1(u: &ColumnState) -> Result<Circuit> {
    let e1 = ColumnState::e1();
    pauli_group()
        .iter()
        .find(|(p, _)| u.times(p) == e1)
        .map(|(_, w)| Circuit::new(w.to_vec()))
        .ok_or_else(|| Error::InvariantViolation(format!("{u} is not a Pauli image of e₁")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn g(re: i64, im: i64) -> GaussianInteger {
        GaussianInteger::new(re, im)
    }

    fn col(a: GaussianInteger, c: GaussianInteger, k: u32, l: u32) -> ColumnState {
        ColumnState::new(a, c, DenominatorExponent::new(k, l)).unwrap()
    }

    #[test]
    fn apply_gate_examples() {
        let e1 = ColumnState::e1();
        assert_eq!(apply_gate(Gate::VZ, &e1).unwrap(), col(g(1, 2), g(0, 0), 1, 0));
        assert_eq!(apply_gate(Gate::H, &col(g(1, 0), g(1, 0), 0, 1)).unwrap(), e1);
        assert_eq!(apply_gate(Gate::X, &e1).unwrap(), col(g(0, 0), g(1, 0), 0, 0));
    }

    #[test]
    fn non_unit_column_rejected() {
        assert!(ColumnState::new(g(1, 1), g(0, 0), DenominatorExponent::new(0, 0)).is_err());
    }

    #[test]
    fn sqrt2_reduction_examples() {
        let (c, s) = reduce_sqrt2(&col(g(1, 0), g(1, 0), 0, 1)).unwrap();
        assert_eq!(c.to_string(), "H");
        assert_eq!(s, ColumnState::e1());

        let (c, s) = reduce_sqrt2(&col(g(1, 1), g(0, 0), 0, 1)).unwrap();
        assert_eq!(s.exp.l, 0);
        assert_eq!(c.v_count(), 0);

        let u = col(g(1, 1), g(1, 1), 0, 2);
        let (c, s) = reduce_sqrt2(&u).unwrap();
        assert_eq!(s.exp, DenominatorExponent::new(0, 0));
        assert_eq!(apply_word(c.gates(), &u), s);
    }

    #[test]
    fn sqrt2_reduction_keeps_sqrt5_exponent() {
        let base = apply_gate(Gate::VX, &apply_gate(Gate::VZ, &ColumnState::e1()).unwrap()).unwrap();
        for word in [&[Gate::H][..], &[Gate::W], &[Gate::H, Gate::W], &[Gate::W, Gate::H, Gate::S]] {
            let u = apply_word(word, &base);
            let (c, s) = reduce_sqrt2(&u).unwrap();
            assert_eq!(s.exp.l, 0);
            assert_eq!(s.exp.k, base.exp.k);
            assert_eq!(apply_word(c.gates(), &u), s);
        }
    }

    #[test]
    fn table_entries_are_divisible_after_application() {
        for (key, gate) in SINGLE_TABLE.iter().chain(FULL_TABLE.iter()) {
            let a = g(key[0] as i64, key[1] as i64);
            let c = g(key[2] as i64, key[3] as i64);
            let m = gate.matrix();
            let five = BigInt::from(5);
            let x = &(&m.a * &a) + &(&m.b * &c);
            let y = &(&m.c * &a) + &(&m.d * &c);
            assert!(x.divisible_by(&five) && y.divisible_by(&five), "{key:?} {gate}");
        }
    }

    #[test]
    fn table_lookup_examples() {
        assert_eq!(table_lookup([2, 1, 0, 0]), Some(Gate::VZ));
        assert_eq!(table_lookup([2, 2, 1, 1]), Some(Gate::VYd));
        assert_eq!(table_lookup([1, 2, 1, 1]), None);
    }

    #[test]
    fn sqrt5_step_on_vz_column() {
        let u = col(g(1, 2), g(0, 0), 1, 0);
        let (c, s) = reduce_sqrt5_step(&u).unwrap();
        assert_eq!(c.v_count(), 1);
        assert!(c.gates().contains(&Gate::VZd));
        assert_eq!(s.exp.k, 0);
        let fin = pauli_to_e1(&s).unwrap();
        assert_eq!(apply_word(fin.gates(), &s), ColumnState::e1());
    }

    #[test]
    fn sqrt5_steps_strictly_decrease() {
        let words: [&[Gate]; 3] = [
            &[Gate::VX, Gate::VY, Gate::VZd, Gate::VX],
            &[Gate::VYd, Gate::VYd, Gate::VZ],
            &[Gate::VZ, Gate::VX, Gate::VX, Gate::VY, Gate::VZ],
        ];
        for word in words {
            let mut u = apply_word(word, &ColumnState::e1());
            while u.exp.k > 0 {
                let (c, next) = reduce_sqrt5_step(&u).unwrap();
                assert_eq!(c.v_count(), 1);
                assert_eq!(next.exp.k + 1, u.exp.k);
                u = next;
            }
        }
    }
}
