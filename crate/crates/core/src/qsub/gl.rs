use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::flag::FlagOracle;
use crate::error::{Error, Result};
use crate::fourier::{fourier_transform, CharacterSet};
use crate::qsim::{Circuit, Gate, QueryCounter};
use crate::space::FpSpace;

/// Output law of the Goldreich–Levin circuit on the `v` register with every ancilla back at 0.
#[derive(Clone, Debug)]
pub struct GlDistribution {
    pub space: FpSpace,
    /// `p_y` for each `y`.
    pub probs: Vec<f64>,
    /// Mass on outcomes with some ancilla nonzero.
    pub remainder: f64,
    /// Oracle uses of one shot.
    pub cost: QueryCounter,
}

impl GlDistribution {
    /// The law the circuit produces for flag probabilities `q`: `p_y = |FT(1 − 2q)(y)|²`.
    pub fn from_flag_probabilities(space: FpSpace, q: &[f64], cost: QueryCounter) -> Result<Self> {
        let g: Vec<Complex64> = q.iter().map(|&x| Complex64::new(1.0 - 2.0 * x, 0.0)).collect();
        let probs: Vec<f64> = fourier_transform(space, &g)?.coeffs().iter().map(|c| c.norm_sqr()).collect();
        let remainder = (1.0 - probs.iter().sum::<f64>()).max(0.0);
        Ok(GlDistribution {
            space,
            probs,
            remainder,
            cost,
        })
    }
}

/// `QFT^{⊗n}`, `W`, a `π` phase on the flagged subspace, `W†`, inverse `QFT^{⊗n}`.
pub fn gl_circuit(o: &FlagOracle) -> Result<Circuit> {
    let l = o.layout().clone();
    let mut c = Circuit::new(l.clone());
    for &w in &o.v_wires {
        c.push(Gate::qft(&l, w)?);
    }
    c.append(&o.circuit);
    c.push(Gate::phase(&l, o.flagged.clone(), std::f64::consts::PI)?);
    c.append(&o.circuit.inverse());
    for &w in &o.v_wires {
        c.push(Gate::inv_qft(&l, w)?);
    }
    Ok(c)
}

/// Runs the circuit once from `|0⟩` and reads `p_y` exactly.
pub fn gl_fourier_sample(o: &FlagOracle) -> Result<GlDistribution> {
    if o.v_wires.iter().any(|&w| o.layout().dim(w) != o.space.p() as usize) || o.v_wires.len() != o.space.n() {
        return Err(Error::Wire("oracle input wires do not match the space".into()));
    }
    let c = gl_circuit(o)?;
    let s = c.run_on_basis(0, &mut QueryCounter::new());
    let probs: Vec<f64> = (0..o.space.size()).map(|y| s.amp(o.input_index(y)).norm_sqr()).collect();
    let remainder = (s.norm_sqr() - probs.iter().sum::<f64>()).max(0.0);
    let mut cost = QueryCounter::new();
    cost.merge_scaled(&o.cost, 2);
    Ok(GlDistribution {
        space: o.space,
        probs,
        remainder,
        cost,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LearnReport {
    pub c: f64,
    pub delta: f64,
    pub shots: u64,
    /// `(y, |1̂(y)|)` estimates for every member of the returned set.
    pub estimates: Vec<(usize, f64)>,
    /// Oracle uses when every shot is paid for.
    pub frequency_cost: QueryCounter,
    /// Oracle uses under amplitude estimation to precision `c/8`.
    pub estimation_cost: QueryCounter,
}

/// Shots that put every `p̂_y` within `c²/16` of `p_y` with probability `1 − δ` (Hoeffding plus a union bound).
pub fn required_shots(size: usize, c: f64, delta: f64) -> u64 {
    let eta = c * c / 16.0;
    ((2.0 * size as f64 / delta).ln() / (2.0 * eta * eta)).ceil() as u64
}

/// `shots` draws from the outcome law, as counts per `y`.
pub fn multinomial_counts<R: Rng + ?Sized>(gl: &GlDistribution, shots: u64, rng: &mut R) -> Vec<u64> {
    let mut counts = vec![0; gl.probs.len()];
    let mut left = shots;
    let mut mass = gl.probs.iter().sum::<f64>() + gl.remainder;
    for (c, &p) in counts.iter_mut().zip(&gl.probs) {
        if left == 0 || mass <= 0.0 {
            break;
        }
        let frac = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(left, frac).map(|b| b.sample(rng)).unwrap_or(0);
        *c = k;
        left -= k;
        mass -= p;
    }
    counts
}

/// Characters whose estimated coefficient `√p̂_y / 2` reaches `3c/4`, excluding `y = 0`.
///
/// The factor 2 converts the transform of `1 − 2q` into the transform of `q` away from zero.
pub fn learn_heavy_characters<R: Rng + ?Sized>(
    gl: &GlDistribution,
    c: f64,
    delta: f64,
    budget: Option<u64>,
    rng: &mut R,
) -> Result<(CharacterSet, LearnReport)> {
    if !(c > 0.0 && c <= 1.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("learning needs c in (0,1], delta in (0,1); got {c}, {delta}")));
    }
    let shots = required_shots(gl.space.size(), c, delta);
    if let Some(b) = budget {
        if b < shots {
            return Err(Error::BudgetExhausted(b as usize));
        }
    }
    let counts = multinomial_counts(gl, shots, rng);
    let mut members = Vec::new();
    let mut estimates = Vec::new();
    for (y, &k) in counts.iter().enumerate().skip(1) {
        let est = (k as f64 / shots as f64).sqrt() / 2.0;
        if est >= 0.75 * c {
            members.push(gl.space.vector(y));
            estimates.push((y, est));
        }
    }
    let mut frequency_cost = QueryCounter::new();
    frequency_cost.merge_scaled(&gl.cost, shots);
    let rounds = (8.0 * std::f64::consts::PI / c).ceil() * (2.0 * gl.space.size() as f64 / delta).ln().ceil();
    let mut estimation_cost = QueryCounter::new();
    estimation_cost.merge_scaled(&gl.cost, rounds as u64);
    Ok((
        CharacterSet::new(members, c)?,
        LearnReport {
            c,
            delta,
            shots,
            estimates,
            frequency_cost,
            estimation_cost,
        },
    ))
}
