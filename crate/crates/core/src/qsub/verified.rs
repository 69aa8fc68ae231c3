use std::sync::Arc;

use crate::avgcase::PlantedAlg;
use crate::error::{Error, Result};
use crate::qsim::{oracle_from_matrix, Circuit, Gate, Layout, QueryCounter, StateVector};
use crate::qsvt::FixedPoint;

use super::verify::{accept_probability, verify_schedule};

/// `ALG` followed by an in-superposition check of its output, with `mark = 1` meaning "claimed correct".
///
/// Wires: `v0..`, `z0..` (dimension `p`), `idx`, `col` (dimension `n`), `m`, `vj`, `out` (dimension `p`), `mark`.
#[derive(Clone, Debug)]
pub struct VerifiedAlg {
    pub alg: Arc<PlantedAlg>,
    pub circuit: Circuit,
    pub schedule: FixedPoint,
    pub eps: f64,
    pub v_wires: Vec<usize>,
    pub z_wires: Vec<usize>,
    pub mark: usize,
}

pub fn verified_layout(p: u32, n: usize) -> Result<Arc<Layout>> {
    let p = p as usize;
    let mut wires: Vec<(String, usize)> = Vec::new();
    wires.extend((0..n).map(|i| (format!("v{i}"), p)));
    wires.extend((0..n).map(|i| (format!("z{i}"), p)));
    for (name, d) in [("idx", n), ("col", n), ("m", p), ("vj", p), ("out", p), ("mark", 2)] {
        wires.push((name.into(), d));
    }
    Layout::new(&wires)
}

/// Leaves `(Mv)_idx − z_idx` in `out`, reading `v` and `z` from wires.
fn mv_minus_z(layout: &Arc<Layout>, u_m: &Gate, v: &[usize], z: &[usize]) -> Result<Circuit> {
    let [idx, col, m, vj, out] = ["idx", "col", "m", "vj", "out"].map(|w| layout.wire(w).expect("declared"));
    let read_v = Gate::indexed_add(layout, col, v.to_vec(), vj)?;
    let mut c = Circuit::new(layout.clone());
    for _ in 0..v.len() {
        c.push(u_m.clone());
        c.push(read_v.clone());
        c.push(Gate::mul_add(layout, m, vj, out)?);
        c.push(read_v.adjoint());
        c.push(u_m.adjoint());
        c.push(Gate::shift(layout, col, 1)?);
    }
    c.push(Gate::indexed_add(layout, idx, z.to_vec(), out)?.adjoint());
    Ok(c)
}

pub fn alg_verified(alg: Arc<PlantedAlg>, eps: f64) -> Result<VerifiedAlg> {
    let space = alg.space();
    let n = space.n();
    let layout = verified_layout(space.p(), n)?;
    let v_wires: Vec<usize> = (0..n).collect();
    let z_wires: Vec<usize> = (n..2 * n).collect();
    let [idx, col, m, vj, out, mark] = ["idx", "col", "m", "vj", "out", "mark"].map(|w| layout.wire(w).expect("declared"));
    let u_m = oracle_from_matrix(&layout, alg.matrix(), idx, col, m)?;
    let diff = mv_minus_z(&layout, &u_m, &v_wires, &z_wires)?;
    let mut a = Circuit::new(layout.clone());
    a.push(Gate::qft(&layout, idx)?);
    a.append(&diff);
    a.push(Gate::compare(&layout, out, None, mark)?);
    a.append(&diff.inverse());

    let schedule = verify_schedule(n, eps)?;
    let mut circuit = Circuit::new(layout.clone());
    circuit.push(alg.select_gate(&layout, &v_wires, &z_wires)?);
    circuit.append(&schedule.circuit(&a, &[idx, col, m, vj, out, mark], &[(mark, 1)])?);
    circuit.push(Gate::pauli_x(&layout, mark)?);
    Ok(VerifiedAlg {
        alg,
        circuit,
        schedule,
        eps,
        v_wires,
        z_wires,
        mark,
    })
}

impl VerifiedAlg {
    pub fn layout(&self) -> &Arc<Layout> {
        self.circuit.layout()
    }

    pub fn input_index(&self, v: usize) -> usize {
        let digits = self.alg.space().digits(v);
        let pairs: Vec<(usize, usize)> = self.v_wires.iter().zip(&digits).map(|(&w, &d)| (w, d as usize)).collect();
        self.layout().index(&pairs)
    }

    pub fn cost(&self) -> QueryCounter {
        self.circuit.query_cost()
    }

    pub fn run(&self, v: usize) -> StateVector {
        self.circuit.run_on_basis(self.input_index(v), &mut QueryCounter::new())
    }

    /// `Pr(mark = 1)` on input `|v, 0⟩`.
    pub fn flag_probability(&self, v: usize) -> f64 {
        let l = self.layout().clone();
        self.run(v).probability(|i| l.digit(i, self.mark) == 1)
    }

    /// `Pr(z, mark)` on input `|v, 0⟩`, indexed `[z][mark]`.
    pub fn joint_distribution(&self, v: usize) -> Result<Vec<[f64; 2]>> {
        let mut wires = self.z_wires.clone();
        wires.push(self.mark);
        let d = self.run(v).distribution(&wires)?;
        Ok(d.chunks(2).map(|c| [c[0], c[1]]).collect())
    }
}

/// `Pr(mark = 1 | v)` in closed form: `p_v` plus the undetected share of every wrong output.
pub fn verified_flag_probability(alg: &PlantedAlg, schedule: &FixedPoint, v: usize) -> f64 {
    let space = alg.space();
    let good = space.digits(alg.correct(v));
    let mut total = 0.0;
    for (z, pz) in alg.output_distribution(v).into_iter().enumerate() {
        if pz == 0.0 {
            continue;
        }
        let mismatches = space.digits(z).iter().zip(&good).filter(|(a, b)| a != b).count();
        total += pz * accept_probability(schedule, space.n(), mismatches);
    }
    total
}

/// Oracle uses of one `ALG_verified` application without building it.
pub fn verified_cost(n: usize, schedule: &FixedPoint) -> QueryCounter {
    let mut c = QueryCounter::new();
    c.add("ALG", 1);
    c.add("U_M", (2 * n * schedule.length) as u64);
    c.add("U_M†", (2 * n * schedule.length) as u64);
    c
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("error parameter {eps} outside (0, 1)")))
    }
}
