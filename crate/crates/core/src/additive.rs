//! Robust Bogolyubov subspaces and the local-correction shift.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{inner_product, rref_with_pivots, FpVector};
use crate::fourier::{four_fold_counts, indicator_spectrum, CharacterSet};
use crate::space::{FpSet, FpSpace};

/// Diagonalized generators of `V^⊥` with their pivot columns.
///
/// `V = {v : ⟨v, b_j⟩ = 0 ∀j}` and `dim V = n − t`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionBasis {
    space: FpSpace,
    pub basis: Vec<FpVector>,
    pub pivots: Vec<usize>,
}

impl CorrectionBasis {
    pub fn t(&self) -> usize {
        self.basis.len()
    }

    pub fn space(&self) -> FpSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.n() - self.t()
    }

    pub fn contains(&self, v: &FpVector) -> bool {
        self.basis.iter().all(|b| inner_product(v, b).map(|e| e.value() == 0).unwrap_or(false))
    }

    /// The subspace `V` as an enumerated set.
    pub fn members(&self) -> FpSet {
        let idx: Vec<usize> = self.basis.iter().map(|b| self.space.index_of(b)).collect();
        let space = self.space;
        let mut set = FpSet::empty(space);
        for v in 0..space.size() {
            if idx.iter().all(|&b| space.dot(v, b) == 0) {
                set.insert(v);
            }
        }
        set
    }

    /// `t ≤ ceil(4/α²)`.
    pub fn check_size(&self, alpha: f64) -> Result<()> {
        let bound = (4.0 / (alpha * alpha)).ceil() as usize;
        if self.t() > bound {
            return Err(Error::InvalidParameter(format!(
                "correction basis has t = {} > ceil(4/alpha^2) = {bound}",
                self.t()
            )));
        }
        Ok(())
    }
}

/// The annihilator of `R`, diagonalized.
pub fn bogolyubov_subspace(r: &CharacterSet, space: FpSpace) -> Result<CorrectionBasis> {
    for y in &r.members {
        if y.len() != space.n() || y.field() != space.field() {
            return Err(Error::DimensionMismatch {
                expected: space.n(),
                found: y.len(),
            });
        }
    }
    let rr = rref_with_pivots(&r.members)?;
    Ok(CorrectionBasis {
        space,
        basis: rr.basis,
        pivots: rr.pivots,
    })
}

/// `s = Σ_j ⟨y, b_j⟩ e_{k_j}`; `y − s` lies in `V`.
pub fn shift_vector(y: &FpVector, cb: &CorrectionBasis) -> Result<FpVector> {
    let mut s = FpVector::zero(cb.space.field(), cb.space.n());
    for (b, &k) in cb.basis.iter().zip(&cb.pivots) {
        s.set(k, inner_product(y, b)?.value());
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub x: [FpVector; 4],
    pub s: FpVector,
    pub attempts: usize,
}

impl Decomposition {
    /// Builds `x4 = y − s − x1 − x2 − x3`.
    pub fn complete(y: &FpVector, s: FpVector, x1: FpVector, x2: FpVector, x3: FpVector) -> Result<Self> {
        let x4 = y.sub(&s)?.sub(&x1)?.sub(&x2)?.sub(&x3)?;
        Ok(Decomposition {
            x: [x1, x2, x3, x4],
            s,
            attempts: 1,
        })
    }

    pub fn sum(&self) -> Result<FpVector> {
        let mut acc = self.s.clone();
        for xi in &self.x {
            acc = acc.add(xi)?;
        }
        Ok(acc)
    }
}

/// Samples triples from `sampler` until `x4` is accepted by `member`, up to `budget` attempts.
pub fn decompose(
    y: &FpVector,
    cb: &CorrectionBasis,
    mut sampler: impl FnMut() -> Result<FpVector>,
    member: impl Fn(&FpVector) -> bool,
    budget: usize,
) -> Result<Decomposition> {
    let s = shift_vector(y, cb)?;
    for attempt in 1..=budget {
        let (x1, x2, x3) = (sampler()?, sampler()?, sampler()?);
        let mut d = Decomposition::complete(y, s.clone(), x1, x2, x3)?;
        if member(&d.x[3]) {
            d.attempts = attempt;
            return Ok(d);
        }
    }
    Err(Error::BudgetExhausted(budget))
}

/// `ceil(8/α²)`.
pub fn default_decompose_budget(alpha: f64) -> usize {
    (8.0 / (alpha * alpha)).ceil() as usize
}

#[derive(Clone, Debug, Serialize)]
pub struct BogolyubovReport {
    pub alpha: f64,
    pub density: f64,
    pub subspace_dim: usize,
    pub dim_lower_bound: f64,
    /// `n − 4/α² ≤ 0`: only the probability bound carries information.
    pub vacuous: bool,
    pub r_size: usize,
    pub min_decomposition_prob: f64,
    pub min_conditional_prob: f64,
    #[serde(skip)]
    pub r_used: CharacterSet,
}

impl BogolyubovReport {
    pub fn violations(&self) -> Vec<String> {
        let a = self.alpha;
        let mut out = Vec::new();
        if !self.vacuous && (self.subspace_dim as f64) < self.dim_lower_bound.ceil() {
            out.push(format!("dim V = {} < {:.3}", self.subspace_dim, self.dim_lower_bound));
        }
        if self.r_size as f64 > 4.0 / (a * a) + 1e-9 {
            out.push(format!("|R| = {} > 4/alpha^2", self.r_size));
        }
        if self.min_decomposition_prob < a.powi(5) - 1e-12 {
            out.push(format!("min probability {} < alpha^5", self.min_decomposition_prob));
        }
        if self.min_conditional_prob < a * a - 1e-12 {
            out.push(format!("min conditional probability {} < alpha^2", self.min_conditional_prob));
        }
        out
    }

    pub fn holds(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Checks `Spec_X(α^{3/2}) ⊆ R ⊆ Spec_X(α^{3/2}/2)`.
pub fn check_sandwich(x: &FpSet, r: &CharacterSet, alpha: f64) -> Result<()> {
    let sp = indicator_spectrum(x);
    let hi = alpha.powf(1.5);
    let space = x.space();
    for y in 1..space.size() {
        let mag = sp.at(y).norm();
        let member = r.contains(&space.vector(y));
        if mag >= hi && !member {
            return Err(Error::Sandwich(format!("{} has |coefficient| {mag:.4} but is missing", space.vector(y))));
        }
        if member && mag < hi / 2.0 - 1e-12 {
            return Err(Error::Sandwich(format!("{} has |coefficient| {mag:.4} below the lower threshold", space.vector(y))));
        }
    }
    Ok(())
}

/// Exhaustive check of the robust Bogolyubov guarantees for `X` of density at least `α`.
pub fn verify_robust_bogolyubov(x: &FpSet, r: &CharacterSet, alpha: f64) -> Result<BogolyubovReport> {
    let density = x.density();
    if !(alpha > 0.0 && alpha <= 1.0) || density < alpha - 1e-12 {
        return Err(Error::InvalidParameter(format!("density {density} is below alpha {alpha}")));
    }
    check_sandwich(x, r, alpha)?;
    let space = x.space();
    let cb = bogolyubov_subspace(r, space)?;
    let v = cb.members();
    let counts = four_fold_counts(x)?;
    let n3 = (space.size() as f64).powi(3);
    let min_count = v.indices().into_iter().map(|i| counts[i]).min().unwrap_or(0);
    let min_prob = min_count as f64 / n3;
    let x_len = x.len() as f64;
    let dim_lower_bound = space.n() as f64 - 4.0 / (alpha * alpha);
    Ok(BogolyubovReport {
        alpha,
        density,
        subspace_dim: cb.dim(),
        dim_lower_bound,
        vacuous: dim_lower_bound <= 0.0,
        r_size: r.len(),
        min_decomposition_prob: min_prob,
        min_conditional_prob: if x_len > 0.0 { min_count as f64 / x_len.powi(3) } else { 0.0 },
        r_used: r.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::spec_threshold;
    use proptest::prelude::*;

    fn v2(e: &[u32]) -> FpVector {
        FpVector::from_slice(2, e).unwrap()
    }

    fn two_constraints() -> CorrectionBasis {
        let r = CharacterSet::new(vec![v2(&[1, 1, 0]), v2(&[0, 1, 1])], 0.0).unwrap();
        bogolyubov_subspace(&r, FpSpace::with_modulus(2, 3).unwrap()).unwrap()
    }

    #[test]
    fn subspace_examples() {
        let s4 = FpSpace::with_modulus(2, 4).unwrap();
        let full = bogolyubov_subspace(&CharacterSet::empty(0.1), s4).unwrap();
        assert_eq!((full.t(), full.dim(), full.members().len()), (0, 4, 16));

        let e1 = bogolyubov_subspace(&CharacterSet::new(vec![v2(&[1, 0, 0, 0])], 0.1).unwrap(), s4).unwrap();
        assert_eq!(e1.dim(), 3);
        assert_eq!(e1.members(), FpSet::from_predicate(s4, |d| d[0] == 0));

        let cb = two_constraints();
        assert_eq!(cb.dim(), 1);
        assert_eq!(cb.members().indices(), vec![0, 7]);
    }

    #[test]
    fn shift_examples() {
        let cb = two_constraints();
        let y = v2(&[1, 1, 1]);
        assert!(shift_vector(&y, &cb).unwrap().is_zero());
        assert!(cb.contains(&y));

        let y = v2(&[1, 0, 0]);
        let s = shift_vector(&y, &cb).unwrap();
        assert_eq!(s, v2(&[1, 0, 0]));
        assert!(y.sub(&s).unwrap().is_zero());

        let s4 = FpSpace::with_modulus(2, 4).unwrap();
        let empty = bogolyubov_subspace(&CharacterSet::empty(0.1), s4).unwrap();
        assert!(shift_vector(&v2(&[1, 0, 1, 1]), &empty).unwrap().is_zero());
    }

    #[test]
    fn decompose_examples() {
        let s4 = FpSpace::with_modulus(2, 4).unwrap();
        let x = FpSet::from_predicate(s4, |d| d[0] == 0);
        let cb = bogolyubov_subspace(&CharacterSet::new(vec![v2(&[1, 0, 0, 0])], 0.5).unwrap(), s4).unwrap();
        let xs = x.indices();
        let mut k = 0;
        let sampler = || {
            k += 3;
            Ok(s4.vector(xs[k % xs.len()]))
        };
        let y = v2(&[0, 1, 1, 0]);
        let d = decompose(&y, &cb, sampler, |v| x.contains(v), 1).unwrap();
        assert_eq!(d.attempts, 1);
        assert_eq!(d.sum().unwrap(), y);

        let full = FpSet::full(s4);
        let t0 = bogolyubov_subspace(&CharacterSet::empty(1.0), s4).unwrap();
        let d = decompose(&v2(&[1, 1, 1, 1]), &t0, || Ok(s4.vector(5)), |v| full.contains(v), 1).unwrap();
        assert_eq!(d.attempts, 1);

        let err = decompose(&y, &t0, || Ok(s4.vector(0)), |_| true, 0);
        assert!(matches!(err, Err(Error::BudgetExhausted(0))));
    }

    #[test]
    fn half_space_report() {
        let s4 = FpSpace::with_modulus(2, 4).unwrap();
        let x = FpSet::from_predicate(s4, |d| d[0] == 0);
        let r = CharacterSet::new(vec![v2(&[1, 0, 0, 0])], 0.5f64.powf(1.5)).unwrap();
        let rep = verify_robust_bogolyubov(&x, &r, 0.5).unwrap();
        assert_eq!(rep.subspace_dim, 3);
        assert!((rep.min_conditional_prob - 1.0).abs() < 1e-15);
        assert!(rep.holds());

        let bad = CharacterSet::empty(0.3);
        assert!(matches!(verify_robust_bogolyubov(&x, &bad, 0.5), Err(Error::Sandwich(_))));

        let full = FpSet::full(s4);
        let rep = verify_robust_bogolyubov(&full, &CharacterSet::empty(1.0), 1.0).unwrap();
        assert_eq!(rep.min_decomposition_prob, 1.0);
        assert!(rep.holds());
    }

    proptest! {
        #[test]
        fn shift_lands_in_v_and_is_v_invariant(
            p in prop::sample::select(vec![2u32, 3]),
            rows in prop::collection::vec(prop::collection::vec(0u32..3, 3), 0..3),
            y in prop::collection::vec(0u32..3, 3),
        ) {
            let s = FpSpace::with_modulus(p, 3).unwrap();
            let members: Vec<FpVector> = rows.iter()
                .map(|r| FpVector::new(s.field(), r.iter().copied()))
                .filter(|r| !r.is_zero())
                .collect();
            let cb = bogolyubov_subspace(&CharacterSet::new(members, 0.0).unwrap(), s).unwrap();
            let y = FpVector::new(s.field(), y);
            let sh = shift_vector(&y, &cb).unwrap();
            prop_assert!(sh.weight() <= cb.t());
            prop_assert!(cb.contains(&y.sub(&sh).unwrap()));
            for v in cb.members().indices() {
                let moved = y.add(&s.vector(v)).unwrap();
                prop_assert_eq!(shift_vector(&moved, &cb).unwrap(), sh.clone());
            }
        }

        #[test]
        fn guarantees_hold_on_random_sets(bits in prop::collection::vec(any::<bool>(), 32)) {
            let s = FpSpace::with_modulus(2, 5).unwrap();
            let x = FpSet::from_mask(s, bits).unwrap();
            prop_assume!(!x.is_empty());
            let alpha = x.density();
            let r = spec_threshold(&indicator_spectrum(&x), alpha.powf(1.5) * 0.75).unwrap();
            let rep = verify_robust_bogolyubov(&x, &r, alpha).unwrap();
            prop_assert!(rep.holds(), "{:?}", rep.violations());
        }
    }
}
