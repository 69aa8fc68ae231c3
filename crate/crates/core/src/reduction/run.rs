use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{BandChoice, Mode, ReductionConfig};
use super::oracles::{alg_boost, derive_seed, threshold_degree, AlgRunner, Verifier};
use crate::additive::{bogolyubov_subspace, shift_vector, CorrectionBasis};
use crate::avgcase::{random_threshold, PlantedAlg, ThresholdPair};
use crate::error::{Error, Result};
use crate::ff::{matvec, FpVector};
use crate::qsim::QueryCounter;
use crate::qsub::{
    alg_verified, gl_fourier_sample, indicator_oracle, indicator_t_for, learn_heavy_characters, q_sample_law, sample_schedule,
    sampling_oracle, verified_cost, verify_schedule, GlDistribution, SampleLaw,
};
use crate::space::FpSet;

#[derive(Clone, Debug, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub threshold: ThresholdPair,
    pub t: f64,
    pub band_choice: Option<BandChoice>,
    pub x_star_density: f64,
    pub rho_w: f64,
    /// Learned characters as mixed-radix indices.
    pub learned: Vec<usize>,
    pub basis_t: usize,
    pub pivots: Vec<usize>,
    pub shots: u64,
    pub sampler_mass: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttemptRecord {
    pub epoch: usize,
    /// `x1..x4` as far as they were produced.
    pub x: Vec<usize>,
    pub s: Option<usize>,
    pub boosted: usize,
    pub candidate: Option<usize>,
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionTrace {
    pub v: usize,
    pub seed: u64,
    pub mode: Mode,
    pub epochs: Vec<EpochRecord>,
    pub attempts: Vec<AttemptRecord>,
    /// Oracle uses with heavy-character learning paid by amplitude estimation.
    pub queries: QueryCounter,
    /// The same with learning paid shot by shot.
    pub frequency_queries: QueryCounter,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    /// A verified `Mv`, or `None` when every budget ran out.
    pub result: Option<FpVector>,
    pub trace: ReductionTrace,
}

#[derive(Debug)]
pub struct Preparation {
    pub record: EpochRecord,
    pub basis: CorrectionBasis,
    pub sampler: SampleLaw,
    pub cost: QueryCounter,
    pub frequency_cost: QueryCounter,
}

#[derive(Debug)]
struct CircuitArtifacts {
    gl: GlDistribution,
    sampler: SampleLaw,
    x_star_density: f64,
    rho_w: f64,
}

/// The reduction for one planted algorithm, with learning shared by every input under the same seed.
#[derive(Debug)]
pub struct Reducer {
    alg: Arc<PlantedAlg>,
    cfg: ReductionConfig,
    runner: AlgRunner,
    boost_verifier: Verifier,
    final_verifier: Verifier,
    artifacts: HashMap<usize, Arc<CircuitArtifacts>>,
    preparations: HashMap<(u64, usize), Arc<Preparation>>,
}

/// Half-width of the indicator band on singular values at success threshold `t`.
fn indicator_half_width(t: f64) -> f64 {
    0.5 * t.powf(1.5) - 0.125 * t.powf(2.5)
}

fn choose_band<R: Rng + ?Sized>(base: &FpSet, band: &FpSet, choice: BandChoice, rng: &mut R) -> FpSet {
    let mut out = base.clone();
    for i in band.indices() {
        let take = match choice {
            BandChoice::All => true,
            BandChoice::None => false,
            _ => rng.random::<bool>(),
        };
        if take {
            out.insert(i);
        }
    }
    out
}

impl Reducer {
    pub fn new(alg: Arc<PlantedAlg>, cfg: ReductionConfig) -> Result<Self> {
        cfg.validate()?;
        let mean = alg.profile().mean();
        if cfg.check_premise && mean < cfg.alpha - 1e-12 {
            return Err(Error::PremiseViolated { mean, alpha: cfg.alpha });
        }
        let n = alg.space().n();
        Ok(Reducer {
            runner: AlgRunner::new(&alg, cfg.mode)?,
            boost_verifier: Verifier::new(n, cfg.boost_eps, cfg.mode)?,
            final_verifier: Verifier::new(n, cfg.verify_eps(), cfg.mode)?,
            alg,
            cfg,
            artifacts: HashMap::new(),
            preparations: HashMap::new(),
        })
    }

    pub fn alg(&self) -> &PlantedAlg {
        &self.alg
    }

    pub fn config(&self) -> &ReductionConfig {
        &self.cfg
    }

    fn sampler_mass_lb(&self, tau: f64, eps: f64) -> f64 {
        let hi = tau * (1.0 + self.cfg.eta / 2.0).powi(2);
        let alpha = self.cfg.alpha;
        let lb = (1.0 - 2.0 * eps) * (alpha - hi) / (1.0 - hi);
        lb.clamp(1.0 / self.alg.space().size() as f64, 1.0)
    }

    fn circuit_artifacts(&mut self, tp: &ThresholdPair) -> Result<Arc<CircuitArtifacts>> {
        if let Some(a) = self.artifacts.get(&tp.r) {
            return Ok(a.clone());
        }
        let t = indicator_t_for(tp.tau);
        let eps = self.cfg.indicator_eps();
        let va = alg_verified(self.alg.clone(), t * t)?;
        let io = indicator_oracle(&va, t, eps)?;
        let gl = gl_fourier_sample(&io.oracle)?;
        let q = io.oracle.flag_probabilities();
        let x_star_density = q.iter().filter(|&&x| x >= 0.5).count() as f64 / q.len() as f64;
        let sio = sampling_oracle(&va, tp.tau, self.cfg.eta, eps)?;
        let sampler = q_sample_law(&sio.oracle, self.sampler_mass_lb(tp.tau, eps), self.cfg.sample_delta)?;
        let a = Arc::new(CircuitArtifacts {
            gl,
            sampler,
            x_star_density,
            rho_w: io.partition.rho_w,
        });
        self.artifacts.insert(tp.r, a.clone());
        Ok(a)
    }

    /// Steps 1–4 for `(seed, epoch)`: threshold, indicator, learned characters, basis and sampler.
    pub fn prepare(&mut self, seed: u64, epoch: usize) -> Result<Arc<Preparation>> {
        if let Some(p) = self.preparations.get(&(seed, epoch)) {
            return Ok(p.clone());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, epoch as u64, 2]));
        let cfg = self.cfg.clone();
        let space = self.alg.space();
        let n = space.n();
        let tp = random_threshold(cfg.alpha, cfg.k(), cfg.band, &mut rng)?;
        let t = indicator_t_for(tp.tau);
        let eps = cfg.indicator_eps();
        let (gl, sampler, x_star_density, rho_w, band_choice) = match cfg.mode {
            Mode::Circuit => {
                let a = self.circuit_artifacts(&tp)?;
                (a.gl.clone(), a.sampler.clone(), a.x_star_density, a.rho_w, None)
            }
            Mode::Idealized => {
                let choice = match cfg.band_choice {
                    BandChoice::Adversarial => [BandChoice::None, BandChoice::All, BandChoice::RandomHalf][rng.random_range(0..3)],
                    c => c,
                };
                let prof = self.alg.profile();
                let x_tau = prof.threshold_set(tp.tau);
                let band = FpSet::from_mask(space, prof.values().iter().map(|&p| p >= tp.tau_prime && p < tp.tau).collect())?;
                let x_star = choose_band(&x_tau, &band, choice, &mut rng);
                let flags = |set: &FpSet| -> Vec<f64> {
                    set.mask().iter().map(|&b| if b { 1.0 - 2.0 * eps } else { 2.0 * eps }).collect()
                };
                let base = verified_cost(n, &verify_schedule(n, t * t)?);
                let mut per_use = QueryCounter::new();
                per_use.merge_scaled(&base, threshold_degree(t.sqrt(), 2.0 * indicator_half_width(t), eps)? as u64);
                let mut per_shot = QueryCounter::new();
                per_shot.merge_scaled(&per_use, 2);
                let gl = GlDistribution::from_flag_probabilities(space, &flags(&x_star), per_shot)?;

                let (hi, lo) = (tp.tau * (1.0 + cfg.eta / 2.0).powi(2), tp.tau * (1.0 - cfg.eta / 2.0).powi(2) - t * t);
                let sure = FpSet::from_mask(space, prof.values().iter().map(|&p| p >= hi).collect())?;
                let s_band = FpSet::from_mask(space, prof.values().iter().map(|&p| p > lo && p < hi).collect())?;
                let s_set = choose_band(&sure, &s_band, choice, &mut rng);
                let ts = tp.tau.sqrt();
                let mut s_use = QueryCounter::new();
                s_use.merge_scaled(&base, threshold_degree(ts, cfg.eta * ts, eps)? as u64);
                let schedule = sample_schedule(self.sampler_mass_lb(tp.tau, eps), cfg.sample_delta)?;
                let sampler = SampleLaw::ideal(space, &flags(&s_set), &schedule, &s_use)?;
                (gl, sampler, x_star.density(), band.density(), Some(choice))
            }
        };
        let (r, rep) = learn_heavy_characters(&gl, cfg.learn_c(), cfg.learn_delta, cfg.shots_budget, &mut rng)?;
        let basis = bogolyubov_subspace(&r, space)?;
        let record = EpochRecord {
            epoch,
            threshold: tp,
            t,
            band_choice,
            x_star_density,
            rho_w,
            learned: r.members.iter().map(|y| space.index_of(y)).collect(),
            basis_t: basis.t(),
            pivots: basis.pivots.clone(),
            shots: rep.shots,
            sampler_mass: sampler.flagged_mass,
        };
        let prep = Arc::new(Preparation {
            record,
            basis,
            sampler,
            cost: rep.estimation_cost,
            frequency_cost: rep.frequency_cost,
        });
        self.preparations.insert((seed, epoch), prep.clone());
        Ok(prep)
    }

    fn sample<R: Rng + ?Sized>(&self, sampler: &SampleLaw, rng: &mut R, counter: &mut QueryCounter) -> Option<usize> {
        for _ in 0..self.cfg.sample_tries {
            counter.merge(&sampler.cost);
            if let Some(x) = sampler.sample(rng) {
                return Some(x);
            }
        }
        None
    }

    /// Steps 5–8 once.
    fn attempt<R: Rng + ?Sized>(&mut self, v: usize, prep: &Preparation, rng: &mut R, counter: &mut QueryCounter) -> Result<(AttemptRecord, Option<FpVector>)> {
        let space = self.alg.space();
        let mut rec = AttemptRecord {
            epoch: prep.record.epoch,
            x: Vec::new(),
            s: None,
            boosted: 0,
            candidate: None,
            accepted: false,
        };
        let mut xs = Vec::with_capacity(4);
        for _ in 0..3 {
            match self.sample(&prep.sampler, rng, counter) {
                Some(x) => {
                    xs.push(space.vector(x));
                    rec.x.push(x);
                }
                None => return Ok((rec, None)),
            }
        }
        let y = space.vector(v);
        let s = shift_vector(&y, &prep.basis)?;
        let x4 = y.sub(&s)?.sub(&xs[0])?.sub(&xs[1])?.sub(&xs[2])?;
        rec.s = Some(space.index_of(&s));
        rec.x.push(space.index_of(&x4));
        xs.push(x4);

        let rounds = self.cfg.boost_rounds();
        let mut b = FpVector::zero(space.field(), space.n());
        for x in &xs {
            let xi = space.index_of(x);
            match alg_boost(&self.alg, &mut self.runner, &mut self.boost_verifier, xi, rounds, rng, counter)? {
                Some(z) => {
                    b = b.add(&space.vector(z))?;
                    rec.boosted += 1;
                }
                None => return Ok((rec, None)),
            }
        }
        counter.add("U_M", (s.weight() * space.n()) as u64);
        b = b.add(&matvec(self.alg.matrix(), &s)?)?;
        let bi = space.index_of(&b);
        rec.candidate = Some(bi);
        rec.accepted = self.final_verifier.check(self.alg.matrix(), space, v, bi, rng, counter)?;
        let out = rec.accepted.then_some(b);
        Ok((rec, out))
    }

    /// Runs the reduction on input index `v` with randomness derived from `seed`.
    pub fn run(&mut self, v: usize, seed: u64) -> Result<Outcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, v as u64, 1]));
        let mut trace = ReductionTrace {
            v,
            seed,
            mode: self.cfg.mode,
            epochs: Vec::new(),
            attempts: Vec::new(),
            queries: QueryCounter::new(),
            frequency_queries: QueryCounter::new(),
        };
        let mut per_run = QueryCounter::new();
        for epoch in 0..self.cfg.epochs {
            let prep = self.prepare(seed, epoch)?;
            trace.queries.merge(&prep.cost);
            trace.frequency_queries.merge(&prep.frequency_cost);
            trace.epochs.push(prep.record.clone());
            for _ in 0..self.cfg.outer_budget() {
                let (rec, out) = self.attempt(v, &prep, &mut rng, &mut per_run)?;
                trace.attempts.push(rec);
                if let Some(b) = out {
                    trace.queries.merge(&per_run);
                    trace.frequency_queries.merge(&per_run);
                    return Ok(Outcome { result: Some(b), trace });
                }
            }
        }
        trace.queries.merge(&per_run);
        trace.frequency_queries.merge(&per_run);
        Ok(Outcome { result: None, trace })
    }
}

pub fn run_reduction(alg: &PlantedAlg, v: &FpVector, cfg: &ReductionConfig, seed: u64) -> Result<Outcome> {
    let mut r = Reducer::new(Arc::new(alg.clone()), cfg.clone())?;
    let v = alg.space().index_of(v);
    r.run(v, seed)
}
