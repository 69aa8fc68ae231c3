use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::ReductionConfig;
use super::oracles::{alg_boost, derive_seed, AlgRunner, Verifier};
use super::run::Reducer;
use crate::avgcase::{MatrixRule, PlantedAlg, Policy, SuccessProfile};
use crate::error::{Error, Result};
use crate::ff::{matvec, FpMatrix, FpVector};
use crate::qsim::QueryCounter;

/// An algorithm that receives both `M` and `v`, succeeding with probability `p_v` on good matrices and 0 elsewhere.
#[derive(Clone, Debug)]
pub struct TwoSidedAlg {
    pub profile: SuccessProfile,
    pub policy: Policy,
    pub rule: MatrixRule,
}

impl TwoSidedAlg {
    /// The one-sided algorithm obtained by fixing the matrix.
    pub fn restrict(&self, m: &FpMatrix) -> Result<PlantedAlg> {
        let prof = if self.rule.good(m) {
            self.profile.clone()
        } else {
            SuccessProfile::constant(self.profile.space(), 0.0)?
        };
        PlantedAlg::new(m, prof, self.policy.clone())
    }

    /// `E_{M,v}[p]`.
    pub fn mean(&self) -> f64 {
        self.profile.mean() * self.rule.density(self.profile.space().p())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftOutcome {
    pub result: Option<FpVector>,
    pub draws: usize,
    pub queries: QueryCounter,
}

/// Random shifts `M − R`, each reduced with the one-sided reduction and corrected by `Rv`.
pub fn matrix_shift_reduce(
    alg: &TwoSidedAlg,
    m: &FpMatrix,
    v: &FpVector,
    cfg: &ReductionConfig,
    draws: Option<usize>,
    seed: u64,
) -> Result<ShiftOutcome> {
    cfg.validate()?;
    let space = alg.profile.space();
    let n = space.n();
    let f = space.field();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, space.index_of(v) as u64, 3]));
    let mut inner = cfg.clone();
    inner.check_premise = false;
    inner.epochs = 1;
    let mut check = Verifier::new(n, cfg.delta / 2.0, cfg.mode)?;
    let mut queries = QueryCounter::new();
    let draws_max = draws.unwrap_or_else(|| (8.0 / cfg.alpha).ceil() as usize);
    for draw in 1..=draws_max {
        let r = FpMatrix::from_row_major(f, n, n, (0..n * n).map(|_| rng.random_range(0..f.modulus())).collect())?;
        let shifted = alg.restrict(&m.sub(&r)?)?;
        let mut red = Reducer::new(Arc::new(shifted), inner.clone())?;
        let out = red.run(space.index_of(v), rng.random())?;
        queries.merge(&out.trace.queries);
        let Some(b_shift) = out.result else { continue };
        let b = b_shift.add(&matvec(&r, v)?)?;
        if check.check(m, space, space.index_of(v), space.index_of(&b), &mut rng, &mut queries)? {
            return Ok(ShiftOutcome {
                result: Some(b),
                draws: draw,
                queries,
            });
        }
    }
    Ok(ShiftOutcome {
        result: None,
        draws: draws_max,
        queries,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FieldOutcome {
    pub result: Option<FpVector>,
    pub attempts: usize,
    pub queries: QueryCounter,
}

/// Interpolates `Mv` from two boosted points on a random line through `v`.
///
/// With `enforce_gate`, fields smaller than `10/α` are refused.
pub fn large_field_reduce(
    alg: &PlantedAlg,
    v: &FpVector,
    cfg: &ReductionConfig,
    enforce_gate: bool,
    budget: Option<usize>,
    seed: u64,
) -> Result<FieldOutcome> {
    cfg.validate()?;
    let space = alg.space();
    let f = space.field();
    let p = f.modulus();
    if enforce_gate && (p as f64) < 10.0 / cfg.alpha {
        return Err(Error::InvalidParameter(format!("field of size {p} is below 10/alpha = {:.2}", 10.0 / cfg.alpha)));
    }
    if p < 3 {
        return Err(Error::InvalidParameter("interpolation needs two distinct nonzero scalars".into()));
    }
    let n = space.n();
    let vi = space.index_of(v);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, vi as u64, 4]));
    let mut runner = AlgRunner::new(alg, cfg.mode)?;
    let mut boost_check = Verifier::new(n, cfg.boost_eps, cfg.mode)?;
    let mut check = Verifier::new(n, cfg.delta / 2.0, cfg.mode)?;
    let mut queries = QueryCounter::new();
    let rounds = cfg.boost_rounds();
    let budget = budget.unwrap_or_else(|| (16.0 / cfg.alpha.powi(3)).ceil() as usize);
    for attempt in 1..=budget {
        let x = loop {
            let x = space.vector(rng.random_range(0..space.size()));
            if !x.is_zero() || n == 0 {
                break x;
            }
        };
        let la = rng.random_range(1..p);
        let lb = loop {
            let l = rng.random_range(1..p);
            if l != la {
                break l;
            }
        };
        let a = v.add(&x.scale(la))?;
        let b = v.add(&x.scale(lb))?;
        let ma = alg_boost(alg, &mut runner, &mut boost_check, space.index_of(&a), rounds, &mut rng, &mut queries)?;
        let Some(ma) = ma else { continue };
        let mb = alg_boost(alg, &mut runner, &mut boost_check, space.index_of(&b), rounds, &mut rng, &mut queries)?;
        let Some(mb) = mb else { continue };
        let (ma, mb) = (space.vector(ma), space.vector(mb));
        let inv = f.inv(f.sub(lb, la))?;
        let mv = ma.scale(lb).sub(&mb.scale(la))?.scale(inv);
        if check.check(alg.matrix(), space, vi, space.index_of(&mv), &mut rng, &mut queries)? {
            return Ok(FieldOutcome {
                result: Some(mv),
                attempts: attempt,
                queries,
            });
        }
    }
    Ok(FieldOutcome {
        result: None,
        attempts: budget,
        queries,
    })
}
