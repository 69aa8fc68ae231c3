//! Entrywise matrix-vector product and the comparison oracles built on it.

use std::sync::Arc;

use super::gate::{Gate, GateKind};
use super::layout::Layout;
use super::state::Circuit;
use crate::error::{Error, Result};

fn lookup_wires(g: &Gate) -> Result<(&[usize], usize)> {
    match &g.kind {
        GateKind::Lookup { inputs, out, .. } => Ok((inputs, *out)),
        _ => Err(Error::Wire("expected an oracle lookup gate".into())),
    }
}

/// `|i, 0…⟩ → |i, (Mv)_i, 0…⟩`.
///
/// `u_m` reads `M[row][col]` into a scratch wire and `u_v` reads `v[col]` into another;
/// the column wire sweeps `0..n` and wraps back to 0, and both scratch wires are
/// uncomputed after every column, so the circuit makes `n` queries to each of
/// `U_M`, `U_v` and their adjoints.
pub fn build_umv(layout: &Arc<Layout>, u_m: &Gate, u_v: &Gate, out: usize, n: usize) -> Result<Circuit> {
    let (m_in, m_wire) = lookup_wires(u_m)?;
    let (v_in, v_wire) = lookup_wires(u_v)?;
    if m_in.len() != 2 || v_in.len() != 1 || v_in[0] != m_in[1] {
        return Err(Error::Wire("U_v must be indexed by the column wire of U_M".into()));
    }
    let col = m_in[1];
    if layout.dim(col) != n {
        return Err(Error::Wire(format!("column wire has dimension {} but n = {n}", layout.dim(col))));
    }
    let mut c = Circuit::new(layout.clone());
    for _ in 0..n {
        c.push(u_m.clone());
        c.push(u_v.clone());
        c.push(Gate::mul_add(layout, m_wire, v_wire, out)?);
        c.push(u_v.adjoint());
        c.push(u_m.adjoint());
        c.push(Gate::shift(layout, col, 1)?);
    }
    Ok(c)
}

/// Leaves `(Mv)_i − b_i` in `out`; `u_b` must write into `out`.
pub fn build_umv_minus_b(layout: &Arc<Layout>, u_m: &Gate, u_v: &Gate, u_b: &Gate, out: usize, n: usize) -> Result<Circuit> {
    let (_, b_out) = lookup_wires(u_b)?;
    if b_out != out {
        return Err(Error::Wire("U_b must act on the output wire".into()));
    }
    let mut c = build_umv(layout, u_m, u_v, out, n)?;
    c.push(u_b.adjoint());
    Ok(c)
}

/// Flips `flag` exactly when `(Mv)_i ≠ b_i`; all other wires are restored.
pub fn build_mv_neq_b(layout: &Arc<Layout>, u_m: &Gate, u_v: &Gate, u_b: &Gate, out: usize, flag: usize, n: usize) -> Result<Circuit> {
    let diff = build_umv_minus_b(layout, u_m, u_v, u_b, out, n)?;
    let mut c = diff.clone();
    c.push(Gate::compare(layout, out, None, flag)?);
    c.append(&diff.inverse());
    Ok(c)
}
