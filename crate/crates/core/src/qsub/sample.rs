use rand::Rng;
use serde::Serialize;

use super::flag::FlagOracle;
use crate::error::{Error, Result};
use crate::qsim::{sample_index, Circuit, Gate, QueryCounter};
use crate::qsvt::FixedPoint;
use crate::space::{FpSet, FpSpace};

/// Measurement law of the amplified sampler.
#[derive(Clone, Debug, Serialize)]
pub struct SampleLaw {
    #[serde(skip)]
    pub space: FpSpace,
    /// Flagged weight before amplification, the average of `q_v`.
    pub prior_mass: f64,
    /// Probability that the flag reads 1 after amplification.
    pub flagged_mass: f64,
    /// Law of `v` given a flagged outcome, proportional to `q_v`.
    pub law: Vec<f64>,
    pub length: usize,
    /// Oracle uses of one run.
    pub cost: QueryCounter,
}

impl SampleLaw {
    /// Closed form for flag probabilities `q`: amplification acts on the flagged weight only.
    pub fn ideal(space: FpSpace, q: &[f64], schedule: &FixedPoint, per_use: &QueryCounter) -> Result<Self> {
        let prior: f64 = q.iter().sum::<f64>() / q.len() as f64;
        if prior < 1e-12 {
            return Err(Error::EmptyTarget);
        }
        let mut cost = QueryCounter::new();
        cost.merge_scaled(per_use, schedule.length as u64);
        Ok(SampleLaw {
            space,
            prior_mass: prior,
            flagged_mass: schedule.success(prior),
            law: q.iter().map(|x| x / (prior * q.len() as f64)).collect(),
            length: schedule.length,
            cost,
        })
    }

    /// One run: `Some(v)` when the flag reads 1.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<usize> {
        if rng.random::<f64>() < self.flagged_mass {
            Some(sample_index(&self.law, rng))
        } else {
            None
        }
    }

    /// Total variation distance of the flagged law from uniform on `x`.
    pub fn tv_from_uniform(&self, x: &FpSet) -> f64 {
        let u = 1.0 / x.len().max(1) as f64;
        0.5 * self
            .law
            .iter()
            .enumerate()
            .map(|(v, &p)| (p - if x.contains_index(v) { u } else { 0.0 }).abs())
            .sum::<f64>()
    }
}

/// Schedule for flagged weight at least `mass_lb`, failing with probability at most `delta`.
pub fn sample_schedule(mass_lb: f64, delta: f64) -> Result<FixedPoint> {
    FixedPoint::for_failure(mass_lb.sqrt(), delta)
}

/// Uniform superposition on `v`, then `W`, amplified towards the flagged subspace; law read from amplitudes.
pub fn q_sample_law(o: &FlagOracle, mass_lb: f64, delta: f64) -> Result<SampleLaw> {
    let schedule = sample_schedule(mass_lb, delta)?;
    let l = o.layout().clone();
    let mut a = Circuit::new(l.clone());
    for &w in &o.v_wires {
        a.push(Gate::qft(&l, w)?);
    }
    a.append(&o.circuit);
    let zero: Vec<usize> = (0..l.len()).collect();
    let c = schedule.circuit(&a, &zero, &o.flagged)?;
    let s = a.run_on_basis(0, &mut QueryCounter::new());
    let prior_mass = s.probability(|i| o.is_flagged(i));
    if prior_mass < 1e-12 {
        return Err(Error::EmptyTarget);
    }
    let s = c.run_on_basis(0, &mut QueryCounter::new());
    let mut law = vec![0.0; o.space.size()];
    let mut digits = vec![0u32; o.space.n()];
    for (i, amp) in s.amplitudes().iter().enumerate() {
        if o.is_flagged(i) {
            for (d, &w) in digits.iter_mut().zip(&o.v_wires) {
                *d = l.digit(i, w) as u32;
            }
            law[o.space.index_of_digits(&digits)] += amp.norm_sqr();
        }
    }
    let flagged_mass: f64 = law.iter().sum();
    law.iter_mut().for_each(|x| *x /= flagged_mass);
    let mut cost = QueryCounter::new();
    cost.merge_scaled(&o.cost, schedule.length as u64);
    Ok(SampleLaw {
        space: o.space,
        prior_mass,
        flagged_mass,
        law,
        length: schedule.length,
        cost,
    })
}

/// One sample from the amplified sampler; `None` when the flag reads 0.
pub fn q_sample<R: Rng + ?Sized>(o: &FlagOracle, mass_lb: f64, delta: f64, rng: &mut R) -> Result<Option<usize>> {
    Ok(q_sample_law(o, mass_lb, delta)?.sample(rng))
}
