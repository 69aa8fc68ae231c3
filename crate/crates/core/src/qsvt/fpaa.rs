//! Fixed-point amplitude amplification with the Yoder-Low-Chuang phase sequence.
//!
//! With `L = 2l + 1` uses of `A`/`A†` and `γ^{-1} = T_{1/L}(1/δ)`, the phases
//! `α_j = −β_{l−j+1} = 2 arccot(tan(2πj/L) √(1 − γ²))` give success probability
//! `1 − δ² T_L(T_{1/L}(1/δ) √(1 − λ))²`, which is at least `1 − δ²` whenever the
//! marked weight `λ` of `A|0⟩` is at least `w` and `L ≥ ln(2/δ)/√w`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate};

/// Chebyshev polynomial of the first kind, valid for any real argument.
pub fn chebyshev_t(n: f64, x: f64) -> f64 {
    if x.abs() <= 1.0 {
        (n * x.acos()).cos()
    } else if x > 1.0 {
        (n * x.acosh()).cosh()
    } else {
        let v = (n * (-x).acosh()).cosh();
        if (n as i64) % 2 == 0 {
            v
        } else {
            -v
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPoint {
    /// Total uses of `A` and `A†`.
    pub length: usize,
    pub delta: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl FixedPoint {
    /// Smallest schedule reaching success `≥ 1 − δ²` for marked weight `≥ w`.
    pub fn new(w: f64, delta: f64) -> Result<Self> {
        if !(w > 0.0 && w <= 1.0) || !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("fixed-point search needs w in (0,1], delta in (0,1); got {w}, {delta}")));
        }
        let min_len = (2.0 / delta).ln() / w.sqrt();
        let mut length = min_len.ceil().max(1.0) as usize;
        if length % 2 == 0 {
            length += 1;
        }
        Ok(FixedPoint::with_length(length, delta))
    }

    pub fn with_length(length: usize, delta: f64) -> Self {
        let l = (length - 1) / 2;
        let lf = length as f64;
        let gamma = 1.0 / chebyshev_t(1.0 / lf, 1.0 / delta);
        let root = (1.0 - gamma * gamma).max(0.0).sqrt();
        let alphas: Vec<f64> = (1..=l)
            .map(|j| {
                let x = (2.0 * std::f64::consts::PI * j as f64 / lf).tan() * root;
                2.0 * (1.0f64).atan2(x)
            })
            .collect();
        let betas = (1..=l).map(|j| -alphas[l - j]).collect();
        FixedPoint {
            length,
            delta,
            alphas,
            betas,
        }
    }

    /// Amplitude lower bound `δ_lb` and final distance `ε` to the target state (up to global phase).
    pub fn for_distance(delta_lb: f64, eps: f64) -> Result<Self> {
        FixedPoint::new(delta_lb * delta_lb, eps / 2.0)
    }

    /// Amplitude lower bound `δ_lb` and failure probability `f`.
    pub fn for_failure(delta_lb: f64, fail: f64) -> Result<Self> {
        FixedPoint::new(delta_lb * delta_lb, fail.sqrt())
    }

    pub fn iterations(&self) -> usize {
        self.alphas.len()
    }

    /// Closed-form success probability at marked weight `λ`.
    pub fn success(&self, lambda: f64) -> f64 {
        let x = chebyshev_t(1.0 / self.length as f64, 1.0 / self.delta) * (1.0 - lambda).max(0.0).sqrt();
        let t = chebyshev_t(self.length as f64, x);
        1.0 - self.delta * self.delta * t * t
    }

    /// Final state in the basis (marked, unmarked) of the two-dimensional invariant subspace.
    pub fn evolve_2d(&self, lambda: f64) -> [Complex64; 2] {
        let s = [Complex64::new(lambda.sqrt(), 0.0), Complex64::new((1.0 - lambda).max(0.0).sqrt(), 0.0)];
        let mut psi = s;
        for (a, b) in self.alphas.iter().zip(&self.betas) {
            psi[0] *= Complex64::from_polar(1.0, *b);
            // S_s(α) = I − (1 − e^{−iα})|s⟩⟨s|
            let overlap = s[0] * psi[0] + s[1] * psi[1];
            let k = (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -a)) * overlap;
            psi[0] -= k * s[0];
            psi[1] -= k * s[1];
        }
        psi
    }

    /// `A`, then `l` rounds of `S_t(β_j)`, `A†`, `S_0(α_j)`, `A`.
    ///
    /// `zero` lists the wires `A` acts on (reflected about all-zero) and
    /// `marked` the wire values that define the target subspace.
    pub fn circuit(&self, a: &Circuit, zero: &[usize], marked: &[(usize, usize)]) -> Result<Circuit> {
        let layout = a.layout().clone();
        let a_inv = a.inverse();
        let zero_conds: Vec<(usize, usize)> = zero.iter().map(|&w| (w, 0)).collect();
        let mut c = a.clone();
        for (alpha, beta) in self.alphas.iter().zip(&self.betas) {
            c.push(Gate::phase(&layout, marked.to_vec(), *beta)?);
            c.append(&a_inv);
            c.push(Gate::phase(&layout, zero_conds.clone(), -alpha)?);
            c.append(a);
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{CMatrix, Layout, QueryCounter, StateVector};

    #[test]
    fn closed_form_matches_2d_evolution() {
        for (w, delta) in [(0.25, 0.1), (1.0 / 16.0, 0.05), (0.01, 0.3)] {
            let fp = FixedPoint::new(w, delta).unwrap();
            for k in 0..=40 {
                let lambda = k as f64 / 40.0;
                let psi = fp.evolve_2d(lambda);
                assert!((psi[0].norm_sqr() + psi[1].norm_sqr() - 1.0).abs() < 1e-12);
                assert!((psi[0].norm_sqr() - fp.success(lambda)).abs() < 1e-9, "w={w} lambda={lambda}");
                if lambda >= w {
                    assert!(psi[0].norm_sqr() >= 1.0 - delta * delta - 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_weight_stays_put() {
        let fp = FixedPoint::new(0.1, 0.2).unwrap();
        assert!(fp.success(0.0).abs() < 1e-9);
        assert!(fp.evolve_2d(0.0)[0].norm() < 1e-15);
    }

    #[test]
    fn length_grows_with_log_inverse_eps() {
        let coarse = FixedPoint::for_distance(0.25, 0.5).unwrap();
        let fine = FixedPoint::for_distance(0.25, 0.001).unwrap();
        assert!(fine.length > coarse.length);
        let ratio = fine.length as f64 / coarse.length as f64;
        let logs = (4.0f64 / 0.001).ln() / (4.0f64 / 0.5).ln();
        assert!(ratio <= logs + 0.5);
    }

    #[test]
    fn circuit_matches_closed_form() {
        // A = rotation by θ on a qubit, marked = |1⟩
        let l = Layout::new(&[("q", 2)]).unwrap();
        for lambda in [0.05, 0.3, 0.9, 1.0] {
            let th = (lambda as f64).sqrt().asin();
            let rot = CMatrix::from_row_slice(
                2,
                2,
                &[th.cos(), -th.sin(), th.sin(), th.cos()].map(|x| Complex64::new(x, 0.0)),
            );
            let mut a = Circuit::new(l.clone());
            a.push(Gate::dense(&l, vec![0], rot).unwrap());
            let fp = FixedPoint::new(0.05, 0.1).unwrap();
            let c = fp.circuit(&a, &[0], &[(0, 1)]).unwrap();
            let mut s = StateVector::zero(l.clone());
            c.run(&mut s, &mut QueryCounter::new());
            assert!((s.amp(1).norm_sqr() - fp.success(lambda)).abs() < 1e-9);
        }
    }
}
