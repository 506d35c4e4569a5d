//! Exact synthesis of Clifford+V and Pauli+V circuits.

mod column;
mod gate;
mod groups;

use std::fmt;
use std::str::FromStr;

pub use column::{apply_gate, reduce_sqrt2, reduce_sqrt5_step, table_lookup, ColumnState};
pub use gate::{evaluate, Circuit, Gate};
pub use groups::{clifford_table, pauli_group, pauli_s_group, CliffordTable, FiniteGroup, COSET_REPRESENTATIVES};

use crate::error::{Error, Result};
use crate::ring::ExactUnitary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum GateSet {
    #[default]
    CliffordV,
    PauliV,
}

impl GateSet {
    pub fn name(self) -> &'static str {
        match self {
            GateSet::CliffordV => "clifford+v",
            GateSet::PauliV => "pauli+v",
        }
    }

    pub fn synthesize(self, u: &ExactUnitary) -> Result<Circuit> {
        match self {
            GateSet::CliffordV => exact_synth_clifford_v(u),
            GateSet::PauliV => exact_synth_pauli_v(u),
        }
    }
}

impl fmt::Display for GateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clifford+v" | "cliffordv" => Ok(GateSet::CliffordV),
            "pauli+v" | "pauliv" => Ok(GateSet::PauliV),
            _ => Err(Error::Parse(format!("unknown gate set `{s}`"))),
        }
    }
}

/// Minimal-V-count Clifford+V circuit for `u`, in normal form: a word of V
/// gates followed by a Pauli+S word and a Clifford coset representative.
pub fn exact_synth_clifford_v(u: &ExactUnitary) -> Result<Circuit> {
    let u = checked_input(u)?;
    let word = reduce_to_identity(&u, GateSet::CliffordV)?;
    finish(&u, normal_form_clifford(&word.adjoint()))
}

/// Minimal-V-count Pauli+V circuit for `u`. Requires `l = 0` and `det = ±1`.
pub fn exact_synth_pauli_v(u: &ExactUnitary) -> Result<Circuit> {
    let u = checked_input(u)?;
    if u.exp.l != 0 {
        return Err(Error::NotRepresentable(format!(
            "Pauli+V needs √2 exponent 0, got {}",
            u.exp.l
        )));
    }
    match u.det_power_of_i() {
        Some(0) | Some(2) => {}
        _ => {
            return Err(Error::NotRepresentable(
                "Pauli+V needs determinant ±1".into(),
            ))
        }
    }
    let word = reduce_to_identity(&u, GateSet::PauliV)?;
    finish(&u, normal_form_pauli(&word.adjoint()))
}

fn checked_input(u: &ExactUnitary) -> Result<ExactUnitary> {
    let u = ExactUnitary::new(u.a.clone(), u.b.clone(), u.c.clone(), u.d.clone(), u.exp)?;
    if u.det_power_of_i().is_none() {
        return Err(Error::NotRepresentable(
            "determinant is not a power of i".into(),
        ));
    }
    Ok(u)
}

fn finish(u: &ExactUnitary, c: Circuit) -> Result<Circuit> {
    if c.evaluate() != *u {
        return Err(Error::InvariantViolation(format!(
            "synthesized word `{c}` does not evaluate to the input"
        )));
    }
    if c.v_count() != u.sqrt5_exponent() as usize {
        return Err(Error::InvariantViolation(format!(
            "V-count {} differs from √5 exponent {}",
            c.v_count(),
            u.sqrt5_exponent()
        )));
    }
    Ok(c)
}

/// A word `W` with `W·u = I`.
fn reduce_to_identity(u: &ExactUnitary, set: GateSet) -> Result<Circuit> {
    let col = ColumnState::first_column(u);
    let (mut word, mut col) = match set {
        GateSet::CliffordV => reduce_sqrt2(&col)?,
        GateSet::PauliV => (Circuit::empty(), col),
    };
    while col.exp.k > 0 {
        let (step, next) = reduce_sqrt5_step(&col)?;
        word.push_left(step.gates());
        col = next;
    }
    let fin = column::pauli_to_e1(&col)?;
    word.push_left(fin.gates());

    let rest = word.evaluate().mul(u);
    let fixes: &[&[Gate]] = match set {
        GateSet::CliffordV => &[&[], &[Gate::Z], &[Gate::S], &[Gate::Z, Gate::S]],
        GateSet::PauliV => &[&[], &[Gate::Z]],
    };
    let id = ExactUnitary::identity();
    for fix in fixes {
        let c = Circuit::new(fix.to_vec());
        if c.evaluate().mul(&rest) == id {
            word.push_left(fix);
            return Ok(word);
        }
    }
    Err(Error::NotRepresentable(format!(
        "residual diagonal cannot be fixed in {set}"
    )))
}

/// Moves every Clifford gate to the right end, conjugating the V gates it
/// passes, and spells the Clifford remainder canonically.
pub fn normal_form_clifford(c: &Circuit) -> Circuit {
    let table = clifford_table();
    let mut vs = Vec::with_capacity(c.v_count());
    let mut k = table
        .group()
        .position(&ExactUnitary::identity())
        .expect("identity is in the Clifford group");
    for &g in c.gates() {
        if g.is_v() {
            vs.push(table.conjugate(k, g));
        } else {
            k = table.times(k, g);
        }
    }
    vs.extend_from_slice(table.group().word(k));
    Circuit::new(vs)
}

/// Pauli+V analogue of [`normal_form_clifford`]; the remainder is a Pauli word.
pub fn normal_form_pauli(c: &Circuit) -> Circuit {
    let table = clifford_table();
    let paulis = pauli_group();
    let mut vs = Vec::with_capacity(c.v_count());
    let mut k = ExactUnitary::identity();
    for &g in c.gates() {
        if g.is_v() {
            let i = table.group().position(&k).expect("Paulis are Clifford");
            vs.push(table.conjugate(i, g));
        } else {
            k = k.mul(g.matrix());
        }
    }
    let i = paulis
        .position(&k)
        .expect("Pauli+V words have a Pauli remainder");
    vs.extend_from_slice(paulis.word(i));
    Circuit::new(vs)
}
