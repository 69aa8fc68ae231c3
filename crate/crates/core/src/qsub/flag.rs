use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::{CMatrix, Circuit, Gate, Layout, QueryCounter, StateVector};
use crate::space::FpSpace;

/// A unitary `W` that marks input `v` by leaving weight `q_v` on the flagged subspace.
///
/// `W` must preserve the `v` wires; every other wire starts at 0.
#[derive(Clone, Debug)]
pub struct FlagOracle {
    pub space: FpSpace,
    pub circuit: Circuit,
    pub v_wires: Vec<usize>,
    /// Wire values that together mean "flag = 1".
    pub flagged: Vec<(usize, usize)>,
    /// Oracle uses of one application of `W`.
    pub cost: QueryCounter,
}

impl FlagOracle {
    pub fn layout(&self) -> &Arc<Layout> {
        self.circuit.layout()
    }

    /// Basis index of `|v, 0…⟩`.
    pub fn input_index(&self, v: usize) -> usize {
        let l = self.layout();
        let digits = self.space.digits(v);
        l.index(&self.v_wires.iter().zip(&digits).map(|(&w, &d)| (w, d as usize)).collect::<Vec<_>>())
    }

    pub fn is_flagged(&self, i: usize) -> bool {
        let l = self.layout();
        self.flagged.iter().all(|&(w, val)| l.digit(i, w) == val)
    }

    /// `q_v`, read from amplitudes on every input.
    pub fn flag_probabilities(&self) -> Vec<f64> {
        let mut sink = QueryCounter::new();
        (0..self.space.size())
            .map(|v| {
                let s = self.circuit.run_on_basis(self.input_index(v), &mut sink);
                s.probability(|i| self.is_flagged(i))
            })
            .collect()
    }

    pub fn flag_probability(&self, v: usize) -> f64 {
        let s: StateVector = self.circuit.run_on_basis(self.input_index(v), &mut QueryCounter::new());
        s.probability(|i| self.is_flagged(i))
    }
}

/// `|v⟩|0⟩ ↦ |v⟩(√(1 − q_v)|0⟩ + √q_v|1⟩)`, with the flag as a last qubit and one query `U_f`.
pub fn planted_flag_oracle(space: FpSpace, q: &[f64]) -> Result<FlagOracle> {
    if q.len() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            found: q.len(),
        });
    }
    if let Some(bad) = q.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidParameter(format!("flag probability {bad} outside [0, 1]")));
    }
    let mut wires: Vec<(String, usize)> = (0..space.n()).map(|i| (format!("v{i}"), space.p() as usize)).collect();
    wires.push(("flag".into(), 2));
    let layout = Layout::new(&wires)?;
    let v_wires: Vec<usize> = (0..space.n()).collect();
    let flag = space.n();
    let blocks = q
        .iter()
        .map(|&x| {
            let (c, s) = ((1.0 - x).sqrt(), x.sqrt());
            CMatrix::from_row_slice(2, 2, &[c, -s, s, c].map(|a| Complex64::new(a, 0.0)))
        })
        .collect();
    let mut circuit = Circuit::new(layout.clone());
    circuit.push(Gate::select(&layout, v_wires.clone(), vec![flag], blocks)?.labeled("U_f"));
    let cost = circuit.query_cost();
    Ok(FlagOracle {
        space,
        circuit,
        v_wires,
        flagged: vec![(flag, 1)],
        cost,
    })
}
