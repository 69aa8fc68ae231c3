use serde::Serialize;
use statrs::function::erf::erf;

use crate::error::{Error, Result};

const GRID_POINTS: usize = 10_000;
const SUP_TOL: f64 = 1e-6;
const MAX_DEGREE: usize = 20_001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

/// A real polynomial stored by its coefficients in the Chebyshev basis `T_0, T_1, ...`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundedPolynomial {
    pub coeffs: Vec<f64>,
    pub parity: Parity,
}

impl BoundedPolynomial {
    /// Builds a polynomial and checks `|P| ≤ 1 + 1e-6` on a grid of `[−1, 1]`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        let parity = if coeffs.iter().step_by(2).all(|&c| c == 0.0) {
            Parity::Odd
        } else if coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0) {
            Parity::Even
        } else {
            Parity::Mixed
        };
        let p = BoundedPolynomial { coeffs, parity };
        let m = p.sup_norm(-1.0);
        if m > 1.0 + SUP_TOL {
            return Err(Error::InvalidParameter(format!("polynomial exceeds 1 in magnitude ({m})")));
        }
        Ok(p)
    }

    pub fn identity() -> Self {
        BoundedPolynomial {
            coeffs: vec![0.0, 1.0],
            parity: Parity::Odd,
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
    }

    /// Largest `|P|` on a uniform grid of `[lo, 1]`.
    pub fn sup_norm(&self, lo: f64) -> f64 {
        (0..=GRID_POINTS)
            .map(|k| self.eval(lo + (1.0 - lo) * k as f64 / GRID_POINTS as f64).abs())
            .fold(0.0, f64::max)
    }
}

/// Chebyshev interpolant of `f` at `d + 1` first-kind nodes.
fn chebyshev_interpolate(f: impl Fn(f64) -> f64, d: usize) -> Vec<f64> {
    let n = d + 1;
    // cos(πk(j + ½)/n) = cos(π·k(2j + 1)/(2n)), periodic in k(2j + 1) mod 4n
    let table: Vec<f64> = (0..4 * n)
        .map(|m| (std::f64::consts::PI * m as f64 / (2 * n) as f64).cos())
        .collect();
    let vals: Vec<f64> = (0..n).map(|j| f(table[2 * j + 1])).collect();
    (0..n)
        .map(|k| {
            let s: f64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| v * table[(k * (2 * j + 1)) % (4 * n)])
                .sum();
            let c = 2.0 * s / n as f64;
            if k == 0 {
                c / 2.0
            } else {
                c
            }
        })
        .collect()
}

fn scaled(p: &BoundedPolynomial, sup: f64) -> BoundedPolynomial {
    let mut q = p.clone();
    if sup > 1.0 {
        let s = (1.0 - 1e-9) / sup;
        q.coeffs.iter_mut().for_each(|c| *c *= s);
    }
    q
}

/// Odd, smoothed step `½[erf(k(x − t)) + erf(k(x + t))]`.
fn smoothed_step(t: f64, k: f64) -> impl Fn(f64) -> f64 {
    move |x| 0.5 * (erf(k * (x - t)) + erf(k * (x + t)))
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdPolynomial {
    pub poly: BoundedPolynomial,
    pub t: f64,
    pub delta: f64,
    pub eps: f64,
    pub degree: usize,
    /// `degree · δ / ln(1/ε)`.
    pub constant: f64,
    /// Smallest `P` on `[t + δ/2, 1]`.
    pub high_min: f64,
    /// Largest `|P|` on `[0, t − δ/2]`.
    pub low_max: f64,
    /// Largest `|P|` on `[0, 1]`.
    pub sup: f64,
}

impl ThresholdPolynomial {
    pub fn eval(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }
}

struct Bands {
    high_min: f64,
    low_max: f64,
}

fn bands(p: &BoundedPolynomial, t: f64, delta: f64, points: usize) -> Bands {
    let (hi, lo) = (t + delta / 2.0, t - delta / 2.0);
    let mut high_min = f64::INFINITY;
    let mut low_max: f64 = 0.0;
    for k in 0..=points {
        let x = k as f64 / points as f64;
        if x >= hi || k == points {
            high_min = high_min.min(p.eval(x.max(hi)));
        }
        if x <= lo || k == 0 {
            low_max = low_max.max(p.eval(x.min(lo)).abs());
        }
    }
    high_min = high_min.min(p.eval(hi));
    low_max = low_max.max(p.eval(lo).abs());
    Bands { high_min, low_max }
}

/// Candidate degrees: odd, growing by about 10% per step.
fn degree_ladder() -> impl Iterator<Item = usize> {
    std::iter::successors(Some(3usize), |&d| {
        let next = ((d as f64 * 1.1).round() as usize).max(d + 2);
        let next = if next % 2 == 0 { next + 1 } else { next };
        (next <= MAX_DEGREE).then_some(next)
    })
}

/// Odd polynomial with `P ≥ 1 − ε` on `[t + δ/2, 1]`, `|P| ≤ ε` on `[0, t − δ/2]` and `|P| ≤ 1` on `[−1, 1]`.
///
/// The candidates at each degree depend only on `t` and the degree, so the
/// returned degree is non-increasing in both `δ` and `ε`.
pub fn threshold_polynomial(t: f64, delta: f64, eps: f64) -> Result<ThresholdPolynomial> {
    if !(t > 0.0 && t < 1.0) || !(delta > 0.0 && delta < t.min(1.0 - t)) || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold polynomial needs 0 < t < 1, 0 < delta < min(t, 1 - t), 0 < eps < 1; got ({t}, {delta}, {eps})"
        )));
    }
    for d in degree_ladder() {
        for m in [1.5, 2.0, 3.0, 4.0, 6.0] {
            let k = d as f64 / m;
            let mut coeffs = chebyshev_interpolate(smoothed_step(t, k), d);
            for c in coeffs.iter_mut().step_by(2) {
                *c = 0.0;
            }
            let raw = BoundedPolynomial {
                coeffs,
                parity: Parity::Odd,
            };
            // cheap screen on a coarse grid before the full one
            let coarse = (0..=500).map(|k| raw.eval(k as f64 / 500.0).abs()).fold(0.0, f64::max);
            let quick = bands(&scaled(&raw, coarse), t, delta, 500);
            if quick.high_min < 1.0 - eps || quick.low_max > eps {
                continue;
            }
            let poly = scaled(&raw, raw.sup_norm(0.0));
            let full = bands(&poly, t, delta, GRID_POINTS);
            if full.high_min < 1.0 - eps || full.low_max > eps {
                continue;
            }
            let sup = poly.sup_norm(0.0);
            let degree = poly.degree();
            return Ok(ThresholdPolynomial {
                poly,
                t,
                delta,
                eps,
                degree,
                constant: degree as f64 * delta / (1.0 / eps).ln(),
                high_min: full.high_min,
                low_max: full.low_max,
                sup,
            });
        }
    }
    Err(Error::InvalidParameter(format!("no polynomial up to degree {MAX_DEGREE} meets ({t}, {delta}, {eps})")))
}
