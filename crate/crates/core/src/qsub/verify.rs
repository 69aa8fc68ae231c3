use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{matvec, FpMatrix, FpVector};
use crate::qsim::{build_mv_neq_b, oracle_from_matrix, oracle_from_vector, Circuit, Gate, Layout, QueryCounter, StateVector};
use crate::qsvt::FixedPoint;

/// Amplitude lower bound `1/(2√n)` on the mismatch weight `m/n ≥ 1/n`.
pub fn mismatch_amplitude_bound(n: usize) -> f64 {
    0.5 / (n as f64).sqrt()
}

/// Schedule that drives a nonzero mismatch weight to the flag with failure at most `eps`.
pub fn verify_schedule(n: usize, eps: f64) -> Result<FixedPoint> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("verification error {eps} outside (0, 1)")));
    }
    FixedPoint::for_failure(mismatch_amplitude_bound(n), eps)
}

/// Closed-form acceptance probability when `mismatches` of `n` coordinates disagree.
pub fn accept_probability(fp: &FixedPoint, n: usize, mismatches: usize) -> f64 {
    if mismatches == 0 {
        1.0
    } else {
        (1.0 - fp.success(mismatches as f64 / n as f64)).clamp(0.0, 1.0)
    }
}

/// Oracle uses of one verification: each use of `A` computes and uncomputes `Mv − b`,
/// touching `U_M`, `U_v` and their adjoints `2n` times each and `U_b`, `U_b†` once.
pub fn verify_cost(fp: &FixedPoint, n: usize) -> QueryCounter {
    let mut c = QueryCounter::new();
    let uses = (2 * fp.length * n) as u64;
    for k in ["U_M", "U_M†", "U_v", "U_v†"] {
        c.add(k, uses);
    }
    c.add("U_b", fp.length as u64);
    c.add("U_b†", fp.length as u64);
    c
}

/// Circuit for the matrix-vector product verifier on wires `idx, col, m, vj, out, flag`.
#[derive(Clone, Debug)]
pub struct VerifyCircuit {
    pub circuit: Circuit,
    pub schedule: FixedPoint,
    pub flag: usize,
}

impl VerifyCircuit {
    pub fn layout(&self) -> &Arc<Layout> {
        self.circuit.layout()
    }

    /// Probability of reading flag 0, from amplitudes.
    pub fn accept_probability(&self) -> f64 {
        let s = self.circuit.run_on_basis(0, &mut QueryCounter::new());
        let (l, f) = (self.layout().clone(), self.flag);
        s.probability(|i| l.digit(i, f) == 0)
    }

    /// Runs once and measures the flag.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R, counter: &mut QueryCounter) -> Result<bool> {
        let mut s = StateVector::zero(self.layout().clone());
        self.circuit.run(&mut s, counter);
        let (flag, _) = s.measure(&[self.flag], rng)?;
        Ok(flag == 0)
    }
}

/// Layout used by [`q_verify`] for dimension `n` over `F_p`.
pub fn verify_layout(p: u32, n: usize) -> Result<Arc<Layout>> {
    let p = p as usize;
    Layout::new(&[("idx", n), ("col", n), ("m", p), ("vj", p), ("out", p), ("flag", 2)])
}

/// Builds the verifier from oracle gates: `U_M` on `(idx, col) → m`, `U_v` on `col → vj`, `U_b` on `idx → out`.
///
/// `A` puts `idx` in uniform superposition and flips `flag` where `(Mv)_i ≠ b_i`;
/// fixed-point amplification then pushes any nonzero mismatch weight onto `flag = 1`.
pub fn build_q_verify(layout: &Arc<Layout>, u_m: &Gate, u_v: &Gate, u_b: &Gate, n: usize, eps: f64) -> Result<VerifyCircuit> {
    let (idx, out, flag) = (layout.wire("idx")?, layout.wire("out")?, layout.wire("flag")?);
    let schedule = verify_schedule(n, eps)?;
    let mut a = Circuit::new(layout.clone());
    a.push(Gate::qft(layout, idx)?);
    a.append(&build_mv_neq_b(layout, u_m, u_v, u_b, out, flag, n)?);
    let zero: Vec<usize> = (0..layout.len()).collect();
    let circuit = schedule.circuit(&a, &zero, &[(flag, 1)])?;
    Ok(VerifyCircuit { circuit, schedule, flag })
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyOutcome {
    pub accept_probability: f64,
    pub mismatches: usize,
    pub length: usize,
    pub cost: QueryCounter,
}

/// Builds the verifier for concrete `(M, v, b)` and reads the acceptance probability from amplitudes.
pub fn q_verify(m: &FpMatrix, v: &FpVector, b: &FpVector, eps: f64) -> Result<VerifyOutcome> {
    let n = m.cols();
    if m.rows() != n || v.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: v.len() });
    }
    let vc = verify_circuit(m, v, b, eps)?;
    let mismatches = matvec(m, v)?.sub(b)?.weight();
    Ok(VerifyOutcome {
        accept_probability: vc.accept_probability(),
        mismatches,
        length: vc.schedule.length,
        cost: vc.circuit.query_cost(),
    })
}

pub fn verify_circuit(m: &FpMatrix, v: &FpVector, b: &FpVector, eps: f64) -> Result<VerifyCircuit> {
    let n = m.cols();
    let layout = verify_layout(m.field().modulus(), n)?;
    let [idx, col, mw, vj, out] = ["idx", "col", "m", "vj", "out"].map(|w| layout.wire(w).expect("declared"));
    let u_m = oracle_from_matrix(&layout, m, idx, col, mw)?;
    let u_v = oracle_from_vector(&layout, v, col, vj, "U_v")?;
    let u_b = oracle_from_vector(&layout, b, idx, out, "U_b")?;
    build_q_verify(&layout, &u_m, &u_v, &u_b, n, eps)
}
