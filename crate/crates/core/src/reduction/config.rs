use serde::{Deserialize, Serialize};

use crate::avgcase::{default_k, BandMode};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every subroutine simulated through circuits.
    Circuit,
    /// Indicator and sampler replaced by procedures meeting their contracts exactly.
    Idealized,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circuit" => Ok(Mode::Circuit),
            "idealized" | "idealized-oracle" => Ok(Mode::Idealized),
            _ => Err(Error::InvalidParameter(format!("unknown mode {s:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Circuit => "circuit",
            Mode::Idealized => "idealized",
        })
    }
}

/// How the idealized indicator treats inputs in the threshold band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandChoice {
    None,
    All,
    RandomHalf,
    /// One of the other three, drawn per preparation.
    Adversarial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub alpha: f64,
    pub delta: f64,
    pub mode: Mode,
    /// Threshold grid size; `ceil(4/α^{3/2})` when absent.
    pub k: Option<usize>,
    pub band: BandMode,
    pub band_choice: BandChoice,
    /// Attempts per learned basis; `ceil(8/α²)` when absent.
    pub outer_budget: Option<usize>,
    /// Fresh learning rounds after an exhausted outer budget.
    pub epochs: usize,
    /// `ceil(8 ln 8/α)` when absent.
    pub boost_rounds: Option<usize>,
    /// Final check error; `α²/8` when absent.
    pub verify_eps: Option<f64>,
    /// Error of each check inside a boost.
    pub boost_eps: f64,
    /// Indicator and sampler error; `c/16` when absent.
    pub indicator_eps: Option<f64>,
    /// Heavy-character threshold; `(α/2)^{3/2}` when absent.
    pub learn_c: Option<f64>,
    pub learn_delta: f64,
    pub shots_budget: Option<u64>,
    pub sample_delta: f64,
    /// Relative band of the sampling threshold.
    pub eta: f64,
    /// Sampler runs per requested sample before the attempt is abandoned.
    pub sample_tries: usize,
    pub check_premise: bool,
}

impl ReductionConfig {
    pub fn new(alpha: f64, delta: f64, mode: Mode) -> Self {
        ReductionConfig {
            alpha,
            delta,
            mode,
            k: None,
            band: BandMode::Claim,
            band_choice: BandChoice::Adversarial,
            outer_budget: None,
            epochs: 4,
            boost_rounds: None,
            verify_eps: None,
            boost_eps: 1e-9,
            indicator_eps: None,
            learn_c: None,
            learn_delta: 1.0 / 6.0,
            shots_budget: None,
            sample_delta: 0.05,
            eta: 0.2,
            sample_tries: 8,
            check_premise: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| x > 0.0 && x < 1.0;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) || !unit(self.delta) {
            return Err(Error::InvalidParameter(format!("need alpha in (0,1], delta in (0,1); got {}, {}", self.alpha, self.delta)));
        }
        if self.epochs == 0 || self.sample_tries == 0 || self.k == Some(0) || self.outer_budget == Some(0) || self.boost_rounds == Some(0) {
            return Err(Error::InvalidParameter("budgets must be at least 1".into()));
        }
        for x in [self.boost_eps, self.learn_delta, self.sample_delta, self.eta] {
            if !unit(x) {
                return Err(Error::InvalidParameter(format!("parameter {x} outside (0, 1)")));
            }
        }
        for x in [self.verify_eps, self.indicator_eps, self.learn_c].into_iter().flatten() {
            if !unit(x) {
                return Err(Error::InvalidParameter(format!("parameter {x} outside (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k.unwrap_or_else(|| default_k(self.alpha))
    }

    pub fn outer_budget(&self) -> usize {
        self.outer_budget.unwrap_or_else(|| (8.0 / (self.alpha * self.alpha)).ceil() as usize)
    }

    pub fn boost_rounds(&self) -> usize {
        self.boost_rounds.unwrap_or_else(|| (8.0 * 8f64.ln() / self.alpha).ceil() as usize)
    }

    pub fn verify_eps(&self) -> f64 {
        self.verify_eps.unwrap_or(self.alpha * self.alpha / 8.0)
    }

    pub fn learn_c(&self) -> f64 {
        self.learn_c.unwrap_or_else(|| (self.alpha / 2.0).powf(1.5))
    }

    pub fn indicator_eps(&self) -> f64 {
        self.indicator_eps.unwrap_or_else(|| self.learn_c() / 16.0)
    }
}
