//! Discrete Fourier analysis on F_p^n.
//!
//! Convention: `f̂(y) = p^{-n} Σ_x ω^{x·y} f(x)` with `ω = e^{2πi/p}`, so that
//! `f(x) = Σ_y f̂(y) ω^{-x·y}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ff::FpVector;
use crate::space::{FpSet, FpSpace};

/// Work limit for exhaustive enumerations.
pub const ENUMERATION_BUDGET: usize = 1 << 36;

/// Powers of ω for modulus `p`.
pub fn roots_of_unity(p: u32) -> Vec<Complex64> {
    (0..p).map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / p as f64)).collect()
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    space: FpSpace,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn space(&self) -> FpSpace {
        self.space
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn at(&self, y: usize) -> Complex64 {
        self.coeffs[y]
    }

    pub fn coeff(&self, y: &FpVector) -> Complex64 {
        self.coeffs[self.space.index_of(y)]
    }

    pub fn parseval_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Recovers `f` from its coefficients.
    pub fn inverse(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        tensor_dft(self.space, &mut data, -1);
        data
    }
}

/// In-place unnormalized transform along every coordinate with kernel `ω^{sign·x·y}`.
fn tensor_dft(space: FpSpace, data: &mut [Complex64], sign: i32) {
    let p = space.p() as usize;
    let roots = roots_of_unity(space.p());
    let mut stride = 1;
    let mut scratch = vec![Complex64::new(0.0, 0.0); p];
    for _ in 0..space.n() {
        let block = stride * p;
        for base in (0..data.len()).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                if p == 2 {
                    let (a, b) = (data[start], data[start + stride]);
                    data[start] = a + b;
                    data[start + stride] = a - b;
                    continue;
                }
                for (y, s) in scratch.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for x in 0..p {
                        let e = (x * y) % p;
                        let w = if sign >= 0 { roots[e] } else { roots[(p - e) % p] };
                        acc += w * data[start + x * stride];
                    }
                    *s = acc;
                }
                for (y, s) in scratch.iter().enumerate() {
                    data[start + y * stride] = *s;
                }
            }
        }
        stride = block;
    }
}

pub fn fourier_transform(space: FpSpace, f: &[Complex64]) -> Result<Spectrum> {
    if f.len() != space.size() {
        return Err(Error::DimensionMismatch {
            expected: space.size(),
            found: f.len(),
        });
    }
    let mut coeffs = f.to_vec();
    tensor_dft(space, &mut coeffs, 1);
    let scale = 1.0 / space.size() as f64;
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
    Ok(Spectrum { space, coeffs })
}

pub fn fourier_transform_real(space: FpSpace, f: &[f64]) -> Result<Spectrum> {
    let f: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fourier_transform(space, &f)
}

pub fn indicator_spectrum(x: &FpSet) -> Spectrum {
    fourier_transform_real(x.space(), &x.indicator()).expect("mask length matches its space")
}

/// Nonzero characters selected by a Fourier threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterSet {
    pub members: Vec<FpVector>,
    pub gamma: f64,
}

impl CharacterSet {
    pub fn new(members: Vec<FpVector>, gamma: f64) -> Result<Self> {
        if members.iter().any(FpVector::is_zero) {
            return Err(Error::InvalidParameter("the zero character cannot be a member".into()));
        }
        Ok(CharacterSet { members, gamma })
    }

    pub fn empty(gamma: f64) -> Self {
        CharacterSet {
            members: Vec::new(),
            gamma,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, y: &FpVector) -> bool {
        self.members.contains(y)
    }
}

/// `{y ≠ 0 : |f̂(y)| ≥ γ}` in index order.
pub fn spec_threshold(s: &Spectrum, gamma: f64) -> Result<CharacterSet> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be positive, got {gamma}")));
    }
    let members = (1..s.coeffs.len())
        .filter(|&y| s.coeffs[y].norm() >= gamma)
        .map(|y| s.space.vector(y))
        .collect();
    Ok(CharacterSet { members, gamma })
}

/// Number of pairs `(a, b) ∈ A × B` with `a + b = w`, for every `w`.
fn pair_counts(a: &FpSet, b: &FpSet) -> Vec<u64> {
    let space = a.space();
    let mut out = vec![0u64; space.size()];
    let bs = b.indices();
    for x in a.indices() {
        for &y in &bs {
            out[space.add(x, y)] += 1;
        }
    }
    out
}

fn check_budget(x: &FpSet) -> Result<()> {
    let size = x.space().size();
    let needed = size.saturating_mul(size).saturating_mul(2);
    if needed > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            needed,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// `#{(x1, x2, x3, x4) ∈ X^4 : x1 + x2 + x3 + x4 = v}` for every `v`, by exact counting.
pub fn four_fold_counts(x: &FpSet) -> Result<Vec<u64>> {
    check_budget(x)?;
    let space = x.space();
    let c2 = pair_counts(x, x);
    let mut c4 = vec![0u64; space.size()];
    for (w1, &a) in c2.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (w2, &b) in c2.iter().enumerate() {
            if b != 0 {
                c4[space.add(w1, w2)] += a * b;
            }
        }
    }
    Ok(c4)
}

/// `Pr_{x1,x2,x3 ∈ F^n}[x1, x2, x3, v − x1 − x2 − x3 ∈ X]`, i.e. `(1_X^{*4})(v)`.
pub fn convolution_probability(x: &FpSet, v: &FpVector) -> Result<f64> {
    check_budget(x)?;
    let space = x.space();
    let target = space.index_of(v);
    let c2 = pair_counts(x, x);
    let mut count = 0u64;
    for (w, &a) in c2.iter().enumerate() {
        if a != 0 {
            count += a * c2[space.sub(target, w)];
        }
    }
    Ok(count as f64 / (space.size() as f64).powi(3))
}

/// All values of `(1_X^{*4})` as probabilities.
pub fn convolution_probabilities(x: &FpSet) -> Result<Vec<f64>> {
    let denom = (x.space().size() as f64).powi(3);
    Ok(four_fold_counts(x)?.into_iter().map(|c| c as f64 / denom).collect())
}

/// `Σ_y f̂(y)^4 ω^{-v·y}`, the Fourier side of the four-fold convolution.
pub fn convolution_from_spectrum(s: &Spectrum, v: usize) -> Complex64 {
    let space = s.space;
    let roots = roots_of_unity(space.p());
    let p = space.p();
    s.coeffs
        .iter()
        .enumerate()
        .map(|(y, c)| c.powi(4) * roots[((p - space.dot(v, y)) % p) as usize])
        .sum()
}
