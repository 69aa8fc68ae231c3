use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::gate::{CMatrix, Gate};
use super::layout::Layout;
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Oracle uses keyed by label (`U_M`, `U_M†`, `ALG`, ...).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounter {
    counts: BTreeMap<String, u64>,
}

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, key: &str, k: u64) {
        *self.counts.entry(key.to_string()).or_insert(0) += k;
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    /// Uses of `key` and its adjoint together.
    pub fn both(&self, key: &str) -> u64 {
        self.get(key) + self.get(&format!("{key}†"))
    }

    pub fn merge(&mut self, other: &QueryCounter) {
        for (k, v) in &other.counts {
            self.add(k, *v);
        }
    }

    /// Adds `other` scaled by `times`.
    pub fn merge_scaled(&mut self, other: &QueryCounter, times: u64) {
        for (k, v) in &other.counts {
            self.add(k, *v * times);
        }
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }
}

#[derive(Clone, Debug)]
pub struct StateVector {
    layout: Arc<Layout>,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(layout: Arc<Layout>, idx: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.total_dim()];
        amps[idx] = Complex64::new(1.0, 0.0);
        StateVector { layout, amps }
    }

    pub fn zero(layout: Arc<Layout>) -> Self {
        StateVector::basis(layout, 0)
    }

    pub fn from_amplitudes(layout: Arc<Layout>, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.total_dim(),
                found: amps.len(),
            });
        }
        let s = StateVector { layout, amps };
        s.check_norm()?;
        Ok(s)
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, idx: usize) -> Complex64 {
        self.amps[idx]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_norm(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(n));
        }
        Ok(())
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn apply(&mut self, gate: &Gate, counter: &mut QueryCounter) {
        if let Some(key) = gate.query_key() {
            counter.add(&key, 1);
        }
        gate.apply(&self.layout, &mut self.amps);
    }

    /// Probability that `pred` holds for the measured basis index.
    pub fn probability(&self, pred: impl Fn(usize) -> bool) -> f64 {
        self.amps.iter().enumerate().filter(|(i, _)| pred(*i)).map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Joint outcome distribution of `wires`, indexed by their joint value.
    pub fn distribution(&self, wires: &[usize]) -> Result<Vec<f64>> {
        self.layout.check_distinct(wires)?;
        self.check_norm()?;
        let mut out = vec![0.0; self.layout.joint_dim(wires)];
        for (i, a) in self.amps.iter().enumerate() {
            out[self.layout.joint(i, wires)] += a.norm_sqr();
        }
        Ok(out)
    }

    /// Measures `wires`, returning their joint value and the collapsed state.
    pub fn measure<R: Rng + ?Sized>(&self, wires: &[usize], rng: &mut R) -> Result<(usize, StateVector)> {
        let dist = self.distribution(wires)?;
        let outcome = sample_index(&dist, rng);
        let mut amps = self.amps.clone();
        for (i, a) in amps.iter_mut().enumerate() {
            if self.layout.joint(i, wires) != outcome {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        let scale = 1.0 / dist[outcome].sqrt();
        amps.iter_mut().for_each(|a| *a *= scale);
        Ok((
            outcome,
            StateVector {
                layout: self.layout.clone(),
                amps,
            },
        ))
    }
}

/// Draws an index from a distribution that sums to 1 up to rounding.
pub fn sample_index<R: Rng + ?Sized>(dist: &[f64], rng: &mut R) -> usize {
    let total: f64 = dist.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &p) in dist.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        last = i;
        if u < p {
            return i;
        }
        u -= p;
    }
    last
}

/// An ordered gate list over a fixed layout.
#[derive(Clone, Debug)]
pub struct Circuit {
    layout: Arc<Layout>,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(layout: Arc<Layout>) -> Self {
        Circuit {
            layout,
            gates: Vec::new(),
        }
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
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

    pub fn push(&mut self, g: Gate) {
        self.gates.push(g);
    }

    pub fn append(&mut self, other: &Circuit) {
        self.gates.extend(other.gates.iter().cloned());
    }

    /// Mirror image: reversed order, every gate replaced by its adjoint.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            layout: self.layout.clone(),
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    pub fn run(&self, state: &mut StateVector, counter: &mut QueryCounter) {
        for g in &self.gates {
            state.apply(g, counter);
        }
    }

    pub fn run_on_basis(&self, idx: usize, counter: &mut QueryCounter) -> StateVector {
        let mut s = StateVector::basis(self.layout.clone(), idx);
        self.run(&mut s, counter);
        s
    }

    /// Oracle uses of one run.
    pub fn query_cost(&self) -> QueryCounter {
        let mut c = QueryCounter::new();
        for g in &self.gates {
            if let Some(k) = g.query_key() {
                c.add(&k, 1);
            }
        }
        c
    }

    /// Dense matrix by columns; only for small layouts.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let d = self.layout.total_dim();
        if d > 1 << 12 {
            return Err(Error::DomainTooLarge(d));
        }
        let mut m = CMatrix::zeros(d, d);
        let mut sink = QueryCounter::new();
        for c in 0..d {
            let s = self.run_on_basis(c, &mut sink);
            for (r, a) in s.amps.iter().enumerate() {
                m[(r, c)] = *a;
            }
        }
        Ok(m)
    }

    /// `max |C†C − I|` over entries.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let m = self.to_dense()?;
        let prod = m.adjoint() * &m;
        let mut worst: f64 = 0.0;
        for i in 0..prod.nrows() {
            for j in 0..prod.ncols() {
                let t = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - Complex64::new(t, 0.0)).norm());
            }
        }
        Ok(worst)
    }
}
