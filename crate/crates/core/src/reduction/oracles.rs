use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::Rng;

use super::config::Mode;
use crate::avgcase::PlantedAlg;
use crate::error::Result;
use crate::ff::{matvec, FpMatrix};
use crate::qsim::{Gate, Layout, QueryCounter, StateVector};
use crate::qsub::{accept_probability, verify_circuit, verify_cost, verify_schedule};
use crate::qsvt::{threshold_polynomial, FixedPoint};
use crate::space::FpSpace;

/// Mixes seed parts into one RNG seed (splitmix64 finalizer over a running hash).
pub fn derive_seed(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &p in parts {
        h ^= p.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_add(0x9e37_79b9_7f4a_7c15);
        h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        h ^= h >> 31;
    }
    h
}

/// Degree of the threshold polynomial for `(t, δ, ε)`, cached process-wide.
pub fn threshold_degree(t: f64, delta: f64, eps: f64) -> Result<usize> {
    static CACHE: OnceLock<Mutex<HashMap<[u64; 3], usize>>> = OnceLock::new();
    let key = [t.to_bits(), delta.to_bits(), eps.to_bits()];
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&d) = cache.lock().expect("poisoned").get(&key) {
        return Ok(d);
    }
    let d = threshold_polynomial(t, delta, eps)?.degree;
    cache.lock().expect("poisoned").insert(key, d);
    Ok(d)
}

/// Runs `ALG^M` on classical inputs, by circuit or by direct sampling.
#[derive(Debug)]
pub struct AlgRunner {
    mode: Mode,
    select: Option<(std::sync::Arc<Layout>, Gate)>,
    cache: HashMap<usize, Vec<f64>>,
}

impl AlgRunner {
    pub fn new(alg: &PlantedAlg, mode: Mode) -> Result<Self> {
        let select = match mode {
            Mode::Idealized => None,
            Mode::Circuit => {
                let space = alg.space();
                let n = space.n();
                let p = space.p() as usize;
                let mut wires: Vec<(String, usize)> = (0..n).map(|i| (format!("v{i}"), p)).collect();
                wires.extend((0..n).map(|i| (format!("z{i}"), p)));
                let layout = Layout::new(&wires)?;
                let v: Vec<usize> = (0..n).collect();
                let z: Vec<usize> = (n..2 * n).collect();
                let gate = alg.select_gate(&layout, &v, &z)?;
                Some((layout, gate))
            }
        };
        Ok(AlgRunner {
            mode,
            select,
            cache: HashMap::new(),
        })
    }

    /// One run on input index `x`, measured; returns the output index.
    pub fn run<R: Rng + ?Sized>(&mut self, alg: &PlantedAlg, x: usize, rng: &mut R, counter: &mut QueryCounter) -> usize {
        counter.add("ALG", 1);
        match (&self.mode, &self.select) {
            (Mode::Circuit, Some((layout, gate))) => {
                let size = alg.space().size();
                let dist = self.cache.entry(x).or_insert_with(|| {
                    let mut s = StateVector::basis(layout.clone(), x * size);
                    s.apply(gate, &mut QueryCounter::new());
                    s.amplitudes()[x * size..(x + 1) * size].iter().map(|a| a.norm_sqr()).collect()
                });
                crate::qsim::sample_index(dist, rng)
            }
            _ => alg.sample_index(x, rng),
        }
    }
}

/// Matrix-vector product checks with a fixed error, by circuit or closed form.
#[derive(Debug)]
pub struct Verifier {
    mode: Mode,
    pub eps: f64,
    pub schedule: FixedPoint,
    cost: QueryCounter,
    cache: HashMap<(usize, usize), f64>,
}

impl Verifier {
    pub fn new(n: usize, eps: f64, mode: Mode) -> Result<Self> {
        let schedule = verify_schedule(n, eps)?;
        Ok(Verifier {
            mode,
            eps,
            cost: verify_cost(&schedule, n),
            schedule,
            cache: HashMap::new(),
        })
    }

    /// Acceptance probability for the claim `Mx = z`.
    pub fn accept_probability(&mut self, m: &FpMatrix, space: FpSpace, x: usize, z: usize) -> Result<f64> {
        if let Some(&a) = self.cache.get(&(x, z)) {
            return Ok(a);
        }
        let (xv, zv) = (space.vector(x), space.vector(z));
        let a = match self.mode {
            Mode::Circuit => verify_circuit(m, &xv, &zv, self.eps)?.accept_probability(),
            Mode::Idealized => {
                let mism = matvec(m, &xv)?.sub(&zv)?.weight();
                accept_probability(&self.schedule, space.n(), mism)
            }
        };
        self.cache.insert((x, z), a);
        Ok(a)
    }

    /// One verification run with a measured outcome.
    pub fn check<R: Rng + ?Sized>(
        &mut self,
        m: &FpMatrix,
        space: FpSpace,
        x: usize,
        z: usize,
        rng: &mut R,
        counter: &mut QueryCounter,
    ) -> Result<bool> {
        let a = self.accept_probability(m, space, x, z)?;
        counter.merge(&self.cost);
        Ok(rng.random::<f64>() < a)
    }
}

/// Repeats `ALG` on `x` until an output passes verification; `None` if every round is rejected.
pub fn alg_boost<R: Rng + ?Sized>(
    alg: &PlantedAlg,
    runner: &mut AlgRunner,
    verifier: &mut Verifier,
    x: usize,
    rounds: usize,
    rng: &mut R,
    counter: &mut QueryCounter,
) -> Result<Option<usize>> {
    for _ in 0..rounds {
        let z = runner.run(alg, x, rng, counter);
        if verifier.check(alg.matrix(), alg.space(), x, z, rng, counter)? {
            return Ok(Some(z));
        }
    }
    Ok(None)
}
