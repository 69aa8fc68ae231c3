use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::layout::Layout;
use crate::error::{Error, Result};
use crate::ff::{FpMatrix, FpVector};

pub type CMatrix = DMatrix<Complex64>;

const UNITARY_TOL: f64 = 1e-9;

/// A linear map applied directly to amplitudes, for operators without a gate-level description.
pub trait Operator: Send + Sync + fmt::Debug {
    fn apply(&self, layout: &Layout, amps: &mut Vec<Complex64>, adjoint: bool);
}

#[derive(Clone, Debug)]
pub enum GateKind {
    /// `QFT_d|x⟩ = d^{-1/2} Σ_y ω_d^{xy}|y⟩` on one wire.
    Qft { wire: usize, inverse: bool },
    /// `|x⟩ → |x + by mod d⟩`; the generalized Pauli X.
    Shift { wire: usize, by: usize, negate: bool },
    /// `out ±= table[joint(inputs)]`.
    Lookup { inputs: Vec<usize>, out: usize, table: Arc<Vec<u32>>, negate: bool },
    /// `out ±= a·b` over the field of dimension `dim(out)`.
    MulAdd { a: usize, b: usize, out: usize, negate: bool },
    /// `dst ±= src`.
    Add { src: usize, dst: usize, negate: bool },
    /// `dst ±= sources[index]`.
    IndexedAdd { index: usize, sources: Vec<usize>, dst: usize, negate: bool },
    /// `flag ^= [a ≠ b]`, or `[a ≠ 0]` without `b`.
    Compare { a: usize, b: Option<usize>, flag: usize },
    /// `target += by` when every control wire holds its listed value.
    ControlledShift { controls: Vec<(usize, usize)>, target: usize, by: usize, negate: bool },
    /// Multiplies by `e^{iθ}` when every listed wire holds its value.
    Phase { conds: Vec<(usize, usize)>, theta: f64 },
    Dense { wires: Vec<usize>, matrix: Arc<CMatrix>, adjoint: bool },
    /// Applies `blocks[joint(controls)]` to `targets`.
    Select { controls: Vec<usize>, targets: Vec<usize>, blocks: Arc<Vec<CMatrix>>, adjoint: bool },
    Custom { op: Arc<dyn Operator>, adjoint: bool },
}

/// A gate with an optional oracle label used for query counting.
#[derive(Clone, Debug)]
pub struct Gate {
    pub kind: GateKind,
    label: Option<Arc<str>>,
    dagger: bool,
}

fn unitarity_defect(m: &CMatrix) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn check_unitary(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonUnitary(f64::INFINITY));
    }
    let d = unitarity_defect(m);
    if d > UNITARY_TOL {
        return Err(Error::NonUnitary(d));
    }
    Ok(())
}

pub fn qft_matrix(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |y, x| Complex64::from_polar(norm, 2.0 * PI * ((x * y) % d) as f64 / d as f64))
}

impl Gate {
    fn plain(kind: GateKind) -> Gate {
        Gate {
            kind,
            label: None,
            dagger: false,
        }
    }

    pub fn labeled(mut self, label: &str) -> Gate {
        self.label = Some(Arc::from(label));
        self
    }

    /// Counter key: the label, with `†` for the adjoint.
    pub fn query_key(&self) -> Option<String> {
        self.label.as_ref().map(|l| if self.dagger { format!("{l}†") } else { l.to_string() })
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn qft(layout: &Layout, wire: usize) -> Result<Gate> {
        layout.check_wire(wire)?;
        Ok(Gate::plain(GateKind::Qft { wire, inverse: false }))
    }

    pub fn inv_qft(layout: &Layout, wire: usize) -> Result<Gate> {
        layout.check_wire(wire)?;
        Ok(Gate::plain(GateKind::Qft { wire, inverse: true }))
    }

    pub fn hadamard(layout: &Layout, wire: usize) -> Result<Gate> {
        layout.check_wire(wire)?;
        if layout.dim(wire) != 2 {
            return Err(Error::Wire("Hadamard needs a qubit wire".into()));
        }
        Ok(Gate::plain(GateKind::Qft { wire, inverse: false }))
    }

    pub fn shift(layout: &Layout, wire: usize, by: usize) -> Result<Gate> {
        layout.check_wire(wire)?;
        Ok(Gate::plain(GateKind::Shift {
            wire,
            by: by % layout.dim(wire),
            negate: false,
        }))
    }

    pub fn pauli_x(layout: &Layout, wire: usize) -> Result<Gate> {
        Gate::shift(layout, wire, 1)
    }

    pub fn lookup(layout: &Layout, inputs: Vec<usize>, out: usize, table: Vec<u32>) -> Result<Gate> {
        let mut all = inputs.clone();
        all.push(out);
        layout.check_distinct(&all)?;
        if table.len() != layout.joint_dim(&inputs) {
            return Err(Error::Wire(format!(
                "lookup table has {} entries for {} inputs",
                table.len(),
                layout.joint_dim(&inputs)
            )));
        }
        let d = layout.dim(out) as u32;
        let table = table.into_iter().map(|t| t % d).collect();
        Ok(Gate::plain(GateKind::Lookup {
            inputs,
            out,
            table: Arc::new(table),
            negate: false,
        }))
    }

    fn same_dims(layout: &Layout, ws: &[usize]) -> Result<()> {
        layout.check_distinct(ws)?;
        let d = layout.dim(ws[0]);
        if ws.iter().any(|&w| layout.dim(w) != d) {
            return Err(Error::Wire("arithmetic wires must share a dimension".into()));
        }
        Ok(())
    }

    pub fn mul_add(layout: &Layout, a: usize, b: usize, out: usize) -> Result<Gate> {
        Gate::same_dims(layout, &[a, b, out])?;
        Ok(Gate::plain(GateKind::MulAdd { a, b, out, negate: false }))
    }

    pub fn add(layout: &Layout, src: usize, dst: usize) -> Result<Gate> {
        Gate::same_dims(layout, &[src, dst])?;
        Ok(Gate::plain(GateKind::Add { src, dst, negate: false }))
    }

    pub fn sub(layout: &Layout, src: usize, dst: usize) -> Result<Gate> {
        Ok(Gate::add(layout, src, dst)?.adjoint())
    }

    pub fn indexed_add(layout: &Layout, index: usize, sources: Vec<usize>, dst: usize) -> Result<Gate> {
        let mut all = sources.clone();
        all.push(dst);
        Gate::same_dims(layout, &all)?;
        layout.check_distinct(&[index, dst])?;
        if sources.contains(&index) || layout.dim(index) > sources.len() {
            return Err(Error::Wire("index wire must select among the listed sources".into()));
        }
        Ok(Gate::plain(GateKind::IndexedAdd {
            index,
            sources,
            dst,
            negate: false,
        }))
    }

    pub fn compare(layout: &Layout, a: usize, b: Option<usize>, flag: usize) -> Result<Gate> {
        let mut ws = vec![a, flag];
        if let Some(b) = b {
            ws.push(b);
            if layout.dim(a) != layout.dim(b) {
                return Err(Error::Wire("compared wires must share a dimension".into()));
            }
        }
        layout.check_distinct(&ws)?;
        if layout.dim(flag) != 2 {
            return Err(Error::Wire("comparator flag must be a qubit".into()));
        }
        Ok(Gate::plain(GateKind::Compare { a, b, flag }))
    }

    pub fn controlled_shift(layout: &Layout, controls: Vec<(usize, usize)>, target: usize, by: usize) -> Result<Gate> {
        let mut ws: Vec<usize> = controls.iter().map(|c| c.0).collect();
        ws.push(target);
        layout.check_distinct(&ws)?;
        Ok(Gate::plain(GateKind::ControlledShift {
            controls,
            target,
            by: by % layout.dim(target),
            negate: false,
        }))
    }

    pub fn phase(layout: &Layout, conds: Vec<(usize, usize)>, theta: f64) -> Result<Gate> {
        let ws: Vec<usize> = conds.iter().map(|c| c.0).collect();
        layout.check_distinct(&ws)?;
        Ok(Gate::plain(GateKind::Phase { conds, theta }))
    }

    pub fn dense(layout: &Layout, wires: Vec<usize>, matrix: CMatrix) -> Result<Gate> {
        layout.check_distinct(&wires)?;
        if matrix.nrows() != layout.joint_dim(&wires) {
            return Err(Error::Wire("dense payload does not match its wires".into()));
        }
        check_unitary(&matrix)?;
        Ok(Gate::plain(GateKind::Dense {
            wires,
            matrix: Arc::new(matrix),
            adjoint: false,
        }))
    }

    pub fn select(layout: &Layout, controls: Vec<usize>, targets: Vec<usize>, blocks: Vec<CMatrix>) -> Result<Gate> {
        let mut ws = controls.clone();
        ws.extend(&targets);
        layout.check_distinct(&ws)?;
        if blocks.len() != layout.joint_dim(&controls) {
            return Err(Error::Wire("select needs one block per control value".into()));
        }
        let d = layout.joint_dim(&targets);
        for b in &blocks {
            if b.nrows() != d {
                return Err(Error::Wire("select block does not match its targets".into()));
            }
            check_unitary(b)?;
        }
        Ok(Gate::plain(GateKind::Select {
            controls,
            targets,
            blocks: Arc::new(blocks),
            adjoint: false,
        }))
    }

    pub fn custom(op: Arc<dyn Operator>) -> Gate {
        Gate::plain(GateKind::Custom { op, adjoint: false })
    }

    pub fn adjoint(&self) -> Gate {
        use GateKind::*;
        let kind = match &self.kind {
            Qft { wire, inverse } => Qft {
                wire: *wire,
                inverse: !inverse,
            },
            Shift { wire, by, negate } => Shift {
                wire: *wire,
                by: *by,
                negate: !negate,
            },
            Lookup { inputs, out, table, negate } => Lookup {
                inputs: inputs.clone(),
                out: *out,
                table: table.clone(),
                negate: !negate,
            },
            MulAdd { a, b, out, negate } => MulAdd {
                a: *a,
                b: *b,
                out: *out,
                negate: !negate,
            },
            Add { src, dst, negate } => Add {
                src: *src,
                dst: *dst,
                negate: !negate,
            },
            IndexedAdd { index, sources, dst, negate } => IndexedAdd {
                index: *index,
                sources: sources.clone(),
                dst: *dst,
                negate: !negate,
            },
            Compare { .. } => self.kind.clone(),
            ControlledShift {
                controls,
                target,
                by,
                negate,
            } => ControlledShift {
                controls: controls.clone(),
                target: *target,
                by: *by,
                negate: !negate,
            },
            Phase { conds, theta } => Phase {
                conds: conds.clone(),
                theta: -theta,
            },
            Dense { wires, matrix, adjoint } => Dense {
                wires: wires.clone(),
                matrix: matrix.clone(),
                adjoint: !adjoint,
            },
            Select {
                controls,
                targets,
                blocks,
                adjoint,
            } => Select {
                controls: controls.clone(),
                targets: targets.clone(),
                blocks: blocks.clone(),
                adjoint: !adjoint,
            },
            Custom { op, adjoint } => Custom {
                op: op.clone(),
                adjoint: !adjoint,
            },
        };
        Gate {
            kind,
            label: self.label.clone(),
            dagger: !self.dagger,
        }
    }

    /// Image of a basis index under a permutation gate, or `None` for non-permutation gates.
    #[inline]
    pub fn permute(&self, l: &Layout, i: usize) -> Option<usize> {
        use GateKind::*;
        let add = |i: usize, w: usize, delta: usize| {
            let d = l.dim(w);
            l.with_digit(i, w, (l.digit(i, w) + delta) % d)
        };
        let signed = |x: usize, w: usize, negate: bool| {
            let d = l.dim(w);
            if negate {
                (d - x % d) % d
            } else {
                x % d
            }
        };
        Some(match &self.kind {
            Shift { wire, by, negate } => add(i, *wire, signed(*by, *wire, *negate)),
            Lookup { inputs, out, table, negate } => {
                let t = table[l.joint(i, inputs)] as usize;
                add(i, *out, signed(t, *out, *negate))
            }
            MulAdd { a, b, out, negate } => {
                let prod = l.digit(i, *a) * l.digit(i, *b);
                add(i, *out, signed(prod, *out, *negate))
            }
            Add { src, dst, negate } => add(i, *dst, signed(l.digit(i, *src), *dst, *negate)),
            IndexedAdd {
                index,
                sources,
                dst,
                negate,
            } => {
                let src = sources[l.digit(i, *index)];
                add(i, *dst, signed(l.digit(i, src), *dst, *negate))
            }
            Compare { a, b, flag } => {
                let other = b.map_or(0, |b| l.digit(i, b));
                if l.digit(i, *a) != other {
                    add(i, *flag, 1)
                } else {
                    i
                }
            }
            ControlledShift {
                controls,
                target,
                by,
                negate,
            } => {
                if controls.iter().all(|&(w, v)| l.digit(i, w) == v) {
                    add(i, *target, signed(*by, *target, *negate))
                } else {
                    i
                }
            }
            _ => return None,
        })
    }

    pub fn apply(&self, l: &Layout, amps: &mut Vec<Complex64>) {
        use GateKind::*;
        match &self.kind {
            Phase { conds, theta } => {
                let ph = Complex64::from_polar(1.0, *theta);
                if conds.is_empty() {
                    amps.iter_mut().for_each(|a| *a *= ph);
                    return;
                }
                // enumerate only the indices matching the conditions
                let fixed = l.index(conds);
                let ws: Vec<usize> = conds.iter().map(|c| c.0).collect();
                for i in 0..amps.len() {
                    if ws.iter().all(|&w| l.digit(i, w) == l.digit(fixed, w)) {
                        amps[i] *= ph;
                    }
                }
            }
            Qft { wire, inverse } => {
                let m = qft_matrix(l.dim(*wire));
                apply_dense(l, amps, &[*wire], &m, *inverse);
            }
            Dense { wires, matrix, adjoint } => apply_dense(l, amps, wires, matrix, *adjoint),
            Select {
                controls,
                targets,
                blocks,
                adjoint,
            } => {
                let offs = l.offsets(targets);
                let mut buf = vec![Complex64::new(0.0, 0.0); offs.len()];
                for base in l.bases(targets) {
                    let block = &blocks[l.joint(base, controls)];
                    mat_apply(block, *adjoint, amps, base, &offs, &mut buf);
                }
            }
            Custom { op, adjoint } => op.apply(l, amps, *adjoint),
            _ => {
                let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
                for (i, a) in amps.iter().enumerate() {
                    if *a != Complex64::new(0.0, 0.0) {
                        out[self.permute(l, i).expect("permutation gate")] = *a;
                    }
                }
                *amps = out;
            }
        }
    }
}

fn mat_apply(m: &CMatrix, adjoint: bool, amps: &mut [Complex64], base: usize, offs: &[usize], buf: &mut [Complex64]) {
    let d = offs.len();
    for r in 0..d {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..d {
            let coeff = if adjoint { m[(c, r)].conj() } else { m[(r, c)] };
            acc += coeff * amps[base + offs[c]];
        }
        buf[r] = acc;
    }
    for r in 0..d {
        amps[base + offs[r]] = buf[r];
    }
}

fn apply_dense(l: &Layout, amps: &mut [Complex64], wires: &[usize], m: &CMatrix, adjoint: bool) {
    let offs = l.offsets(wires);
    let mut buf = vec![Complex64::new(0.0, 0.0); offs.len()];
    for base in l.bases(wires) {
        mat_apply(m, adjoint, amps, base, &offs, &mut buf);
    }
}

/// `U_M|j, k, z⟩ = |j, k, z + M_{jk}⟩`.
pub fn oracle_from_matrix(layout: &Layout, m: &FpMatrix, row: usize, col: usize, out: usize) -> Result<Gate> {
    check_field_wire(layout, out, m.field().modulus())?;
    if layout.dim(row) != m.rows() || layout.dim(col) != m.cols() {
        return Err(Error::Wire("index wires do not match the matrix shape".into()));
    }
    Ok(Gate::lookup(layout, vec![row, col], out, m.row_major().to_vec())?.labeled("U_M"))
}

/// `U_v|j, z⟩ = |j, z + v_j⟩`, counted under `label`.
pub fn oracle_from_vector(layout: &Layout, v: &FpVector, idx: usize, out: usize, label: &str) -> Result<Gate> {
    check_field_wire(layout, out, v.modulus())?;
    if layout.dim(idx) != v.len() {
        return Err(Error::Wire("index wire does not match the vector length".into()));
    }
    Ok(Gate::lookup(layout, vec![idx], out, v.entries().to_vec())?.labeled(label))
}

fn check_field_wire(layout: &Layout, w: usize, p: u32) -> Result<()> {
    layout.check_wire(w)?;
    if layout.dim(w) != p as usize {
        return Err(Error::Wire(format!("output wire has dimension {} but the field has {p} elements", layout.dim(w))));
    }
    Ok(())
}
