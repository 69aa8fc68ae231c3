use std::sync::Arc;

use serde::Serialize;

use super::flag::FlagOracle;
use super::verified::{check_eps, VerifiedAlg};
use crate::avgcase::SuccessProfile;
use crate::error::{Error, Result};
use crate::qsim::{Circuit, Gate};
use crate::qsvt::{apply_svt, threshold_polynomial, BlockEncoding, SvtUnitary};
use crate::space::FpSet;

/// Split of the inputs by success probability around `t`.
#[derive(Clone, Debug, Serialize)]
pub struct Partition {
    pub t: f64,
    /// `p_v ≥ hi`.
    #[serde(skip)]
    pub good: FpSet,
    /// `p_v ≤ lo`.
    #[serde(skip)]
    pub bad: FpSet,
    #[serde(skip)]
    pub waste: FpSet,
    pub rho_g: f64,
    pub rho_b: f64,
    pub rho_w: f64,
}

/// Bands `t − 2t²` and `t + t²`.
pub fn partition(profile: &SuccessProfile, t: f64) -> Partition {
    partition_between(profile, t, t - 2.0 * t * t, t + t * t)
}

pub fn partition_between(profile: &SuccessProfile, t: f64, lo: f64, hi: f64) -> Partition {
    let space = profile.space();
    let good = FpSet::from_mask(space, profile.values().iter().map(|&p| p >= hi).collect()).expect("sized");
    let bad = FpSet::from_mask(space, profile.values().iter().map(|&p| p <= lo).collect()).expect("sized");
    let waste = FpSet::from_mask(space, profile.values().iter().map(|&p| p > lo && p < hi).collect()).expect("sized");
    Partition {
        t,
        rho_g: good.density(),
        rho_b: bad.density(),
        rho_w: waste.density(),
        good,
        bad,
        waste,
    }
}

/// The `t` whose good-set boundary `t + t²` equals `τ`.
pub fn indicator_t_for(tau: f64) -> f64 {
    ((1.0 + 4.0 * tau).sqrt() - 1.0) / 2.0
}

/// Threshold transformation of a verified algorithm, flagging `v` when `Pr(mark = 1 | v)` is large.
#[derive(Clone, Debug)]
pub struct IndicatorOracle {
    pub oracle: FlagOracle,
    pub svt: Arc<SvtUnitary>,
    /// Threshold on singular values.
    pub threshold: f64,
    /// Full width of the undecided band around `threshold`.
    pub band: f64,
    pub eps: f64,
    pub degree: usize,
    pub partition: Partition,
}

/// Builds `W` on the verified algorithm's layout plus `ext`, flagging `ext = 0 ∧ mark = 1`.
pub fn svt_oracle(va: &VerifiedAlg, threshold: f64, band: f64, eps: f64, partition: Partition) -> Result<IndicatorOracle> {
    check_eps(eps)?;
    let space = va.alg.space();
    let inputs: Vec<usize> = (0..space.size()).map(|v| va.input_index(v)).collect();
    let l = va.layout().clone();
    let mask: Vec<bool> = (0..l.total_dim()).map(|i| l.digit(i, va.mark) == 1).collect();
    let be = BlockEncoding::from_circuit(&va.circuit, inputs, &mask)?;
    let tp = threshold_polynomial(threshold, band, eps)?;
    let svt = Arc::new(apply_svt(&be, &tp.poly)?);
    let ext_layout = svt.layout().clone();
    let ext = ext_layout.wire("ext")?;
    let mut circuit = Circuit::new(ext_layout);
    circuit.push(Gate::custom(svt.clone()));
    let oracle = FlagOracle {
        space,
        circuit,
        v_wires: va.v_wires.clone(),
        flagged: vec![(ext, 0), (va.mark, 1)],
        cost: svt.cost(),
    };
    Ok(IndicatorOracle {
        oracle,
        svt,
        threshold,
        band,
        eps,
        degree: tp.degree,
        partition,
    })
}

/// Indicator at success threshold `t`: flag probability `≥ 1 − 2ε` on the good set and `≤ 2ε` on the bad set.
///
/// `va` should verify with error `t²`, so a bad input is flagged by `mark` with
/// probability at most `t − t²` and a good one with at least `t + t²`; the singular
/// value threshold sits at `√t` with half-width `½t^{3/2} − ⅛t^{5/2}`.
pub fn indicator_oracle(va: &VerifiedAlg, t: f64, eps: f64) -> Result<IndicatorOracle> {
    if !(t > 0.0 && t < 0.5) {
        return Err(Error::InvalidParameter(format!("indicator threshold {t} outside (0, 1/2)")));
    }
    let half = 0.5 * t.powf(1.5) - 0.125 * t.powf(2.5);
    svt_oracle(va, t.sqrt(), 2.0 * half, eps, partition(va.alg.profile(), t))
}

/// Sampling indicator: threshold `√τ` on singular values with half-width `η√τ/2`.
pub fn sampling_oracle(va: &VerifiedAlg, tau: f64, eta: f64, eps: f64) -> Result<IndicatorOracle> {
    let t = tau.sqrt();
    let lo = tau * (1.0 - eta / 2.0).powi(2) - va.eps;
    let hi = tau * (1.0 + eta / 2.0).powi(2);
    svt_oracle(va, t, eta * t, eps, partition_between(va.alg.profile(), tau, lo, hi))
}
