use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::FpVector;
use crate::space::{FpSet, FpSpace};

/// Per-input success probabilities `p_v`, indexed by mixed-radix `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessProfile {
    space: FpSpace,
    values: Vec<f64>,
}

impl SuccessProfile {
    pub fn new(space: FpSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.size() {
            return Err(Error::DimensionMismatch {
                expected: space.size(),
                found: values.len(),
            });
        }
        if let Some(bad) = values.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParameter(format!("success probability {bad} outside [0, 1]")));
        }
        Ok(SuccessProfile { space, values })
    }

    pub fn from_fn(space: FpSpace, f: impl Fn(&[u32]) -> f64) -> Result<Self> {
        let values = (0..space.size()).map(|i| f(&space.digits(i))).collect();
        SuccessProfile::new(space, values)
    }

    pub fn constant(space: FpSpace, p: f64) -> Result<Self> {
        SuccessProfile::new(space, vec![p; space.size()])
    }

    pub fn space(&self) -> FpSpace {
        self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn get(&self, v: &FpVector) -> f64 {
        self.values[self.space.index_of(v)]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `X_κ = {v : p_v ≥ κ}`.
    pub fn threshold_set(&self, kappa: f64) -> FpSet {
        let mask = self.values.iter().map(|&p| p >= kappa).collect();
        FpSet::from_mask(self.space, mask).expect("profile length matches its space")
    }
}

pub fn threshold_set(profile: &SuccessProfile, kappa: f64) -> FpSet {
    profile.threshold_set(kappa)
}

/// `p_v = 1` when `v_0 = 1`, else 0: correct on exactly one coset of a hyperplane.
pub fn footnote_adversary(space: FpSpace) -> SuccessProfile {
    SuccessProfile::from_fn(space, |d| if d[0] == 1 { 1.0 } else { 0.0 }).expect("values in range")
}

/// `p_v = inside` when `⟨a, v⟩ = c`, else `outside`.
pub fn coset_profile(space: FpSpace, a: &FpVector, c: u32, inside: f64, outside: f64) -> Result<SuccessProfile> {
    if a.len() != space.n() || a.field() != space.field() {
        return Err(Error::DimensionMismatch {
            expected: space.n(),
            found: a.len(),
        });
    }
    if a.is_zero() {
        return Err(Error::InvalidParameter("coset normal vector must be nonzero".into()));
    }
    let ai = space.index_of(a);
    let c = c % space.p();
    let values = (0..space.size()).map(|v| if space.dot(ai, v) == c { inside } else { outside }).collect();
    SuccessProfile::new(space, values)
}

/// `p_v = good` on the half-space `v_0 = 0`, `bad` elsewhere.
pub fn half_space_profile(space: FpSpace, good: f64, bad: f64) -> Result<SuccessProfile> {
    SuccessProfile::from_fn(space, |d| if d[0] == 0 { good } else { bad })
}

/// `p_v = u_v^k` with `u_v` uniform and `k` tuned so the mean is exactly `mean`.
pub fn random_profile<R: Rng + ?Sized>(space: FpSpace, mean: f64, rng: &mut R) -> Result<SuccessProfile> {
    if !(mean > 0.0 && mean < 1.0) {
        return Err(Error::InvalidParameter(format!("target mean {mean} outside (0, 1)")));
    }
    let u: Vec<f64> = (0..space.size()).map(|_| rng.random::<f64>()).collect();
    let avg = |k: f64| u.iter().map(|x| x.powf(k)).sum::<f64>() / u.len() as f64;
    let (mut lo, mut hi) = (1e-6, 1e6);
    if avg(lo) < mean || avg(hi) > mean {
        return Err(Error::InvalidParameter("cannot reach the target mean with this sample".into()));
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if avg(mid) >= mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SuccessProfile::new(space, u.iter().map(|x| x.powf(lo)).collect())
}

/// `p_v = rank(v) / p^n` for a seeded random ranking.
pub fn spread_profile<R: Rng + ?Sized>(space: FpSpace, rng: &mut R) -> SuccessProfile {
    use rand::seq::SliceRandom;
    let mut ranks: Vec<usize> = (0..space.size()).collect();
    ranks.shuffle(rng);
    let n = space.size() as f64;
    SuccessProfile::new(space, ranks.into_iter().map(|r| r as f64 / n).collect()).expect("values in range")
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub mean: f64,
    pub alpha: f64,
    /// Density of `X_{α/2}`, the smallest of all `X_κ` with `κ ≤ α/2`.
    pub min_density: f64,
    pub holds: bool,
}

/// Checks `|X_κ| ≥ (α/2) p^n` for every `κ ≤ α/2`.
pub fn verify_density(profile: &SuccessProfile, alpha: f64) -> Result<DensityReport> {
    let mean = profile.mean();
    if mean < alpha - 1e-12 {
        return Err(Error::PremiseViolated { mean, alpha });
    }
    let min_density = profile.threshold_set(alpha / 2.0).density();
    Ok(DensityReport {
        mean,
        alpha,
        min_density,
        holds: min_density >= alpha / 2.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandMode {
    /// `τ′ = τ − α/(4K)`.
    Claim,
    /// `τ′ = τ − 1/K`.
    Algorithm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThresholdPair {
    pub tau: f64,
    pub tau_prime: f64,
    pub k: usize,
    pub r: usize,
}

impl ThresholdPair {
    pub fn new(alpha: f64, k: usize, r: usize, band: BandMode) -> Result<Self> {
        if k == 0 || r == 0 || r > k {
            return Err(Error::InvalidParameter(format!("need 1 <= r <= K, got r = {r}, K = {k}")));
        }
        let tau = (1.0 + r as f64 / k as f64) * alpha / 4.0;
        let width = match band {
            BandMode::Claim => alpha / (4.0 * k as f64),
            BandMode::Algorithm => 1.0 / k as f64,
        };
        Ok(ThresholdPair {
            tau,
            tau_prime: tau - width,
            k,
            r,
        })
    }
}

/// `K = ceil(4/α^{3/2})`.
pub fn default_k(alpha: f64) -> usize {
    (4.0 / alpha.powf(1.5)).ceil() as usize
}

pub fn random_threshold<R: Rng + ?Sized>(alpha: f64, k: usize, band: BandMode, rng: &mut R) -> Result<ThresholdPair> {
    if k == 0 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    ThresholdPair::new(alpha, k, rng.random_range(1..=k), band)
}

#[derive(Clone, Debug, Serialize)]
pub struct BandReport {
    pub density_tau: f64,
    pub density_tau_prime: f64,
    pub gap: f64,
    /// `max_r |1̂_{X_τ′}(r) − 1̂_{X_τ}(r)|`.
    pub fourier_gap: f64,
    pub within: bool,
}

pub fn check_band(profile: &SuccessProfile, tp: &ThresholdPair) -> BandReport {
    let x = profile.threshold_set(tp.tau);
    let xp = profile.threshold_set(tp.tau_prime);
    let (a, b) = (crate::fourier::indicator_spectrum(&x), crate::fourier::indicator_spectrum(&xp));
    let fourier_gap = a.coeffs().iter().zip(b.coeffs()).map(|(u, w)| (u - w).norm()).fold(0.0, f64::max);
    let gap = xp.density() - x.density();
    BandReport {
        density_tau: x.density(),
        density_tau_prime: xp.density(),
        gap,
        fourier_gap,
        within: gap <= 2.0 / tp.k as f64,
    }
}
