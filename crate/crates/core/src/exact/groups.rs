use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use super::gate::Gate;
use crate::ring::ExactUnitary;

/// A finite matrix group with a shortest word for each element.
#[derive(Debug)]
pub struct FiniteGroup {
    elements: Vec<(ExactUnitary, Vec<Gate>)>,
    index: HashMap<ExactUnitary, usize>,
}

impl FiniteGroup {
    /// Breadth-first closure of `generators`. Elements are ordered by word
    /// length, then by generator order, so the enumeration is deterministic.
    fn closure(generators: &[Gate]) -> FiniteGroup {
        let mut group = FiniteGroup {
            elements: Vec::new(),
            index: HashMap::new(),
        };
        let mut queue = VecDeque::new();
        group.insert(ExactUnitary::identity(), Vec::new());
        queue.push_back(0);
        while let Some(i) = queue.pop_front() {
            for &g in generators {
                let (m, w) = &group.elements[i];
                let next = m.mul(g.matrix());
                if group.index.contains_key(&next) {
                    continue;
                }
                let mut word = w.clone();
                word.push(g);
                queue.push_back(group.insert(next, word));
            }
        }
        group
    }

    fn insert(&mut self, m: ExactUnitary, word: Vec<Gate>) -> usize {
        let i = self.elements.len();
        self.index.insert(m.clone(), i);
        self.elements.push((m, word));
        i
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ExactUnitary, &[Gate])> {
        self.elements.iter().map(|(m, w)| (m, w.as_slice()))
    }

    pub fn matrix(&self, i: usize) -> &ExactUnitary {
        &self.elements[i].0
    }

    pub fn word(&self, i: usize) -> &[Gate] {
        &self.elements[i].1
    }

    pub fn position(&self, m: &ExactUnitary) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// The 16 Pauli operators with phases `±1, ±i`.
pub fn pauli_group() -> &'static FiniteGroup {
    static G: OnceLock<FiniteGroup> = OnceLock::new();
    G.get_or_init(|| FiniteGroup::closure(&[Gate::X, Gate::Y, Gate::Z]))
}

/// The 32-element group generated by the Paulis and `S`.
pub fn pauli_s_group() -> &'static FiniteGroup {
    static G: OnceLock<FiniteGroup> = OnceLock::new();
    G.get_or_init(|| FiniteGroup::closure(&[Gate::X, Gate::Y, Gate::Z, Gate::S, Gate::Sd]))
}

/// Right coset representatives of the Pauli+S group inside the Clifford group.
pub const COSET_REPRESENTATIVES: [&[Gate]; 6] = [
    &[],
    &[Gate::H],
    &[Gate::H, Gate::S],
    &[Gate::W],
    &[Gate::H, Gate::W],
    &[Gate::H, Gate::S, Gate::W],
];

/// The 192-element single-qubit Clifford group including the `ω` phases.
///
/// Each element's word is `B·C` with `B` a shortest Pauli+S word and `C` one
/// of [`COSET_REPRESENTATIVES`], and `V`-gate conjugation is tabulated.
#[derive(Debug)]
pub struct CliffordTable {
    group: FiniteGroup,
    conjugate: Vec<[Gate; 6]>,
}

impl CliffordTable {
    fn build() -> CliffordTable {
        let ps = pauli_s_group();
        let mut group = FiniteGroup {
            elements: Vec::new(),
            index: HashMap::new(),
        };
        for coset in COSET_REPRESENTATIVES {
            let c = coset
                .iter()
                .fold(ExactUnitary::identity(), |acc, g| acc.mul(g.matrix()));
            for (b, bw) in ps.iter() {
                let m = b.mul(&c);
                assert!(
                    group.position(&m).is_none(),
                    "coset representatives overlap"
                );
                let mut word = bw.to_vec();
                word.extend_from_slice(coset);
                group.insert(m, word);
            }
        }
        let conjugate = group
            .elements
            .iter()
            .map(|(k, _)| {
                let kd = k.adjoint();
                Gate::V_GATES.map(|v| {
                    let m = k.mul(v.matrix()).mul(&kd);
                    Gate::V_GATES
                        .into_iter()
                        .find(|w| *w.matrix() == m)
                        .expect("Clifford conjugation permutes the V gates")
                })
            })
            .collect();
        CliffordTable { group, conjugate }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Index of `K·g` for a Clifford gate `g`.
    pub fn times(&self, k: usize, g: Gate) -> usize {
        debug_assert!(!g.is_v());
        let m = self.group.matrix(k).mul(g.matrix());
        self.group
            .position(&m)
            .expect("Clifford group is closed under its generators")
    }

    /// The V gate `K·v·K†`.
    pub fn conjugate(&self, k: usize, v: Gate) -> Gate {
        let j = Gate::V_GATES
            .iter()
            .position(|&w| w == v)
            .expect("conjugate takes a V gate");
        self.conjugate[k][j]
    }
}

pub fn clifford_table() -> &'static CliffordTable {
    static T: OnceLock<CliffordTable> = OnceLock::new();
    T.get_or_init(CliffordTable::build)
}
