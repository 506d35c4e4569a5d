use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::Error;
use crate::ring::{DenominatorExponent, ExactUnitary, GaussianInteger};

/// Symbols of the Clifford+V gate alphabet. `W` is the scalar `ω = e^{iπ/4}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    VX,
    VY,
    VZ,
    VXd,
    VYd,
    VZd,
    X,
    Y,
    Z,
    S,
    Sd,
    H,
    W,
}

impl Gate {
    pub const ALL: [Gate; 13] = [
        Gate::VX,
        Gate::VY,
        Gate::VZ,
        Gate::VXd,
        Gate::VYd,
        Gate::VZd,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::S,
        Gate::Sd,
        Gate::H,
        Gate::W,
    ];

    pub const V_GATES: [Gate; 6] = [Gate::VX, Gate::VY, Gate::VZ, Gate::VXd, Gate::VYd, Gate::VZd];

    pub fn is_v(self) -> bool {
        matches!(
            self,
            Gate::VX | Gate::VY | Gate::VZ | Gate::VXd | Gate::VYd | Gate::VZd
        )
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, Gate::X | Gate::Y | Gate::Z)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Gate::VX => "VX",
            Gate::VY => "VY",
            Gate::VZ => "VZ",
            Gate::VXd => "VXd",
            Gate::VYd => "VYd",
            Gate::VZd => "VZd",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::S => "S",
            Gate::Sd => "Sd",
            Gate::H => "H",
            Gate::W => "W",
        }
    }

    /// Inverse as a word. Every gate but `W` is inverted by a single symbol;
    /// `ω⁻¹ = ω⁷`.
    pub fn inverse(self) -> Vec<Gate> {
        match self {
            Gate::VX => vec![Gate::VXd],
            Gate::VY => vec![Gate::VYd],
            Gate::VZ => vec![Gate::VZd],
            Gate::VXd => vec![Gate::VX],
            Gate::VYd => vec![Gate::VY],
            Gate::VZd => vec![Gate::VZ],
            Gate::S => vec![Gate::Sd],
            Gate::Sd => vec![Gate::S],
            Gate::W => vec![Gate::W; 7],
            g => vec![g],
        }
    }

    pub fn matrix(self) -> &'static ExactUnitary {
        static TABLE: OnceLock<Vec<ExactUnitary>> = OnceLock::new();
        let table = TABLE.get_or_init(|| Gate::ALL.iter().map(|g| g.build_matrix()).collect());
        &table[self as usize]
    }

    fn build_matrix(self) -> ExactUnitary {
        let g = GaussianInteger::new;
        let (a, b, c, d, k, l) = match self {
            Gate::VX => (g(1, 0), g(0, 2), g(0, 2), g(1, 0), 1, 0),
            Gate::VY => (g(1, 0), g(2, 0), g(-2, 0), g(1, 0), 1, 0),
            Gate::VZ => (g(1, 2), g(0, 0), g(0, 0), g(1, -2), 1, 0),
            Gate::VXd => (g(1, 0), g(0, -2), g(0, -2), g(1, 0), 1, 0),
            Gate::VYd => (g(1, 0), g(-2, 0), g(2, 0), g(1, 0), 1, 0),
            Gate::VZd => (g(1, -2), g(0, 0), g(0, 0), g(1, 2), 1, 0),
            Gate::X => (g(0, 0), g(1, 0), g(1, 0), g(0, 0), 0, 0),
            Gate::Y => (g(0, 0), g(0, -1), g(0, 1), g(0, 0), 0, 0),
            Gate::Z => (g(1, 0), g(0, 0), g(0, 0), g(-1, 0), 0, 0),
            Gate::S => (g(1, 0), g(0, 0), g(0, 0), g(0, 1), 0, 0),
            Gate::Sd => (g(1, 0), g(0, 0), g(0, 0), g(0, -1), 0, 0),
            Gate::H => (g(1, 0), g(1, 0), g(1, 0), g(-1, 0), 0, 1),
            Gate::W => (g(1, 1), g(0, 0), g(0, 0), g(1, 1), 0, 1),
        };
        ExactUnitary::new(a, b, c, d, DenominatorExponent::new(k, l))
            .expect("gate matrices are unitary")
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Gate::ALL
            .iter()
            .copied()
            .find(|g| g.symbol() == s)
            .ok_or_else(|| Error::Parse(format!("unknown gate token `{s}`")))
    }
}

/// A gate word. The leftmost gate is the leftmost matrix factor, so it acts
/// last on a state.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Self {
        Circuit { gates }
    }

    pub fn empty() -> Self {
        Circuit::default()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn v_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_v()).count()
    }

    /// `self · other` as matrices.
    pub fn then_right(&self, other: &Circuit) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Circuit { gates }
    }

    pub fn push_left(&mut self, word: &[Gate]) {
        let mut gates = word.to_vec();
        gates.append(&mut self.gates);
        self.gates = gates;
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().flat_map(|g| g.inverse()).collect(),
        }
    }

    /// Exact product of the gate matrices, in least terms.
    pub fn evaluate(&self) -> ExactUnitary {
        self.gates
            .iter()
            .fold(ExactUnitary::identity(), |acc, g| acc.mul(g.matrix()))
    }

    /// True if the word uses only Pauli and V gates.
    pub fn is_pauli_v(&self) -> bool {
        self.gates.iter().all(|g| g.is_v() || g.is_pauli())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.gates.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(g.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(Circuit::new)
    }
}

impl From<Vec<Gate>> for Circuit {
    fn from(gates: Vec<Gate>) -> Self {
        Circuit::new(gates)
    }
}

/// Evaluates a circuit; free-function form of [`Circuit::evaluate`].
pub fn evaluate(c: &Circuit) -> ExactUnitary {
    c.evaluate()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjoint_pairs_cancel() {
        let c: Circuit = "VZ VZd".parse().unwrap();
        assert_eq!(c.evaluate(), ExactUnitary::identity());
        let hh: Circuit = "H H".parse().unwrap();
        assert_eq!(hh.evaluate(), ExactUnitary::identity());
    }

    #[test]
    fn omega_to_the_fourth_is_minus_identity() {
        let c: Circuit = "W W W W".parse().unwrap();
        let m = c.evaluate();
        let minus = ExactUnitary::identity().mul(Gate::Z.matrix()).mul(Gate::X.matrix());
        let minus = minus.mul(Gate::Z.matrix()).mul(Gate::X.matrix());
        assert_eq!(m, minus);
        assert_eq!(m.a, GaussianInteger::new(-1, 0));
        assert_eq!(m.d, GaussianInteger::new(-1, 0));
        assert_eq!(m.exp, DenominatorExponent::new(0, 0));
    }

    #[test]
    fn parse_rejects_unknown_tokens() {
        assert!("VX T".parse::<Circuit>().is_err());
        assert_eq!("".parse::<Circuit>().unwrap(), Circuit::empty());
        let c: Circuit = "  VX\tS  Sd ".parse().unwrap();
        assert_eq!(c.to_string(), "VX S Sd");
        assert_eq!(c.v_count(), 1);
    }

    #[test]
    fn adjoint_word_inverts() {
        for g in Gate::ALL {
            let c = Circuit::new(vec![g, Gate::H, g]);
            assert_eq!(c.then_right(&c.adjoint()).evaluate(), ExactUnitary::identity());
        }
    }

    #[test]
    fn generators_have_power_of_i_determinant() {
        for g in Gate::ALL {
            assert!(g.matrix().det_power_of_i().is_some(), "{g}");
        }
    }
}
