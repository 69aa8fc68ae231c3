use std::sync::Arc;

use num_complex::Complex64;

use super::poly::BoundedPolynomial;
use crate::error::{Error, Result};
use crate::qsim::{CMatrix, Circuit, Layout, Operator, QueryCounter};

const SV_TOL: f64 = 1e-9;

/// The corner `Π̃ U Π` of a unitary, with `Π` spanned by basis states `inputs`
/// and `Π̃` given by a mask over the layout.
#[derive(Clone, Debug)]
pub struct BlockEncoding {
    layout: Arc<Layout>,
    inputs: Vec<usize>,
    block: CMatrix,
    cost: QueryCounter,
}

impl BlockEncoding {
    /// Columns of `U` on the input states, masked by `Π̃`.
    pub fn from_columns(
        layout: Arc<Layout>,
        inputs: Vec<usize>,
        columns: &[Vec<Complex64>],
        out_mask: &[bool],
        cost: QueryCounter,
    ) -> Result<Self> {
        let d = layout.total_dim();
        if columns.len() != inputs.len() || out_mask.len() != d || columns.iter().any(|c| c.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: out_mask.len(),
            });
        }
        let block = CMatrix::from_fn(d, inputs.len(), |r, c| if out_mask[r] { columns[c][r] } else { Complex64::new(0.0, 0.0) });
        Ok(BlockEncoding {
            layout,
            inputs,
            block,
            cost,
        })
    }

    pub fn from_circuit(circ: &Circuit, inputs: Vec<usize>, out_mask: &[bool]) -> Result<Self> {
        let mut sink = QueryCounter::new();
        let columns: Vec<Vec<Complex64>> = inputs
            .iter()
            .map(|&i| circ.run_on_basis(i, &mut sink).amplitudes().to_vec())
            .collect();
        BlockEncoding::from_columns(circ.layout().clone(), inputs, &columns, out_mask, circ.query_cost())
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    /// `Π̃ U |inputs[j]⟩` as the columns of a `D × r` matrix.
    pub fn block(&self) -> &CMatrix {
        &self.block
    }

    /// Oracle uses of one application of `U`.
    pub fn cost(&self) -> &QueryCounter {
        &self.cost
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.block.clone().svd(false, false).singular_values.iter().copied().collect()
    }
}

/// Unitary dilation `[[B', √(I − B'B'†)], [√(I − B'†B'), −B'†]]` of the transformed block,
/// acting on the encoding's layout with one extra qubit appended as the last wire.
#[derive(Debug)]
pub struct SvtUnitary {
    layout: Arc<Layout>,
    base_dim: usize,
    left: CMatrix,
    right: CMatrix,
    old_values: Vec<f64>,
    new_values: Vec<f64>,
    degree: usize,
    base_cost: QueryCounter,
}

/// Appends a qubit named `ext` to `layout`.
pub fn extended_layout(layout: &Layout) -> Result<Arc<Layout>> {
    let mut wires: Vec<(String, usize)> = layout.wires().iter().map(|w| (w.name.clone(), w.dim)).collect();
    wires.push(("ext".into(), 2));
    Layout::new(&wires)
}

/// Maps every singular value `ζ` of the block to `P(ζ)`, keeping the singular vectors.
pub fn apply_svt(be: &BlockEncoding, poly: &BoundedPolynomial) -> Result<SvtUnitary> {
    let d = be.layout.total_dim();
    let svd = be.block.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let r = svd.singular_values.len();
    let mut old_values = Vec::with_capacity(r);
    let mut new_values = Vec::with_capacity(r);
    for &z in svd.singular_values.iter() {
        if z > 1.0 + SV_TOL {
            return Err(Error::InvalidParameter(format!("block has singular value {z} > 1")));
        }
        let pz = poly.eval(z.min(1.0));
        if pz.abs() > 1.0 + 1e-6 {
            return Err(Error::InvalidParameter(format!("|P({z})| = {} exceeds 1", pz.abs())));
        }
        old_values.push(z);
        new_values.push(pz.clamp(-1.0, 1.0));
    }
    let mut right = CMatrix::zeros(d, r);
    for j in 0..r {
        for (k, &inp) in be.inputs.iter().enumerate() {
            right[(inp, j)] += v_t[(j, k)].conj();
        }
    }
    Ok(SvtUnitary {
        layout: extended_layout(&be.layout)?,
        base_dim: d,
        left: u.columns(0, r).into_owned(),
        right,
        old_values,
        new_values,
        degree: poly.degree(),
        base_cost: be.cost.clone(),
    })
}

impl SvtUnitary {
    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn singular_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.old_values.iter().copied().zip(self.new_values.iter().copied())
    }

    pub fn left_vector(&self, j: usize) -> Vec<Complex64> {
        self.left.column(j).iter().copied().collect()
    }

    pub fn right_vector(&self, j: usize) -> Vec<Complex64> {
        self.right.column(j).iter().copied().collect()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Reported oracle cost: `degree` uses of the encoded unitary.
    pub fn cost(&self) -> QueryCounter {
        let mut c = QueryCounter::new();
        c.merge_scaled(&self.base_cost, self.degree.max(1) as u64);
        c
    }

    fn project(m: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
        (0..m.ncols()).map(|j| m.column(j).iter().zip(x).map(|(a, b)| a.conj() * b).sum()).collect()
    }

    fn accumulate(m: &CMatrix, coeffs: &[Complex64], out: &mut [Complex64]) {
        for (j, &c) in coeffs.iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(m.column(j).iter()) {
                *o += a * c;
            }
        }
    }

    /// One block row of the dilation on split halves `(x0, x1)`.
    fn apply_halves(&self, x0: &[Complex64], x1: &[Complex64], adjoint: bool) -> (Vec<Complex64>, Vec<Complex64>) {
        // W  = [[L S R†, I + L(C−1)L†], [I + R(C−1)R†, −R S L†]]
        // W† = [[R S L†, I + R(C−1)R†], [I + L(C−1)L†, −L S R†]]
        let (a, b) = if adjoint { (&self.right, &self.left) } else { (&self.left, &self.right) };
        let s = &self.new_values;
        let c_minus: Vec<f64> = s.iter().map(|&v| (1.0 - v * v).max(0.0).sqrt() - 1.0).collect();
        let bx0 = Self::project(b, x0);
        let ax1 = Self::project(a, x1);
        let mut y0 = x1.to_vec();
        let top: Vec<Complex64> = bx0.iter().zip(s).map(|(p, v)| p * *v).collect();
        Self::accumulate(a, &top, &mut y0);
        let corr: Vec<Complex64> = ax1.iter().zip(&c_minus).map(|(p, v)| p * *v).collect();
        Self::accumulate(a, &corr, &mut y0);
        let mut y1 = x0.to_vec();
        let corr: Vec<Complex64> = bx0.iter().zip(&c_minus).map(|(p, v)| p * *v).collect();
        Self::accumulate(b, &corr, &mut y1);
        let bottom: Vec<Complex64> = ax1.iter().zip(s).map(|(p, v)| -p * *v).collect();
        Self::accumulate(b, &bottom, &mut y1);
        (y0, y1)
    }

    /// Dense matrix on the extended space; only for small layouts.
    pub fn to_dense(&self) -> Result<CMatrix> {
        let d2 = self.layout.total_dim();
        if d2 > 1 << 12 {
            return Err(Error::DomainTooLarge(d2));
        }
        let mut m = CMatrix::zeros(d2, d2);
        for c in 0..d2 {
            let mut amps = vec![Complex64::new(0.0, 0.0); d2];
            amps[c] = Complex64::new(1.0, 0.0);
            self.apply(&self.layout, &mut amps, false);
            for (r, a) in amps.iter().enumerate() {
                m[(r, c)] = *a;
            }
        }
        Ok(m)
    }
}

impl Operator for SvtUnitary {
    fn apply(&self, layout: &Layout, amps: &mut Vec<Complex64>, adjoint: bool) {
        debug_assert_eq!(layout.total_dim(), 2 * self.base_dim);
        let x0: Vec<Complex64> = amps.iter().step_by(2).copied().collect();
        let x1: Vec<Complex64> = amps.iter().skip(1).step_by(2).copied().collect();
        let (y0, y1) = self.apply_halves(&x0, &x1, adjoint);
        for i in 0..self.base_dim {
            amps[2 * i] = y0[i];
            amps[2 * i + 1] = y1[i];
        }
    }
}
