use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::avgcase::{
    coset_profile, footnote_adversary, half_space_profile, random_profile, Instance, MatrixRule, Policy, SuccessProfile,
};
use crate::error::{Error, Result};
use crate::ff::{FpMatrix, FpVector};
use crate::reduction::derive_seed;
use crate::space::FpSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    HalfSpace,
    FootnoteAdversary,
    RandomProfile,
    Coset,
    MatrixAvg,
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::HalfSpace => "half-space",
            InstanceKind::FootnoteAdversary => "footnote-adversary",
            InstanceKind::RandomProfile => "random-profile",
            InstanceKind::Coset => "coset",
            InstanceKind::MatrixAvg => "matrix-avg",
        }
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            InstanceKind::HalfSpace,
            InstanceKind::FootnoteAdversary,
            InstanceKind::RandomProfile,
            InstanceKind::Coset,
            InstanceKind::MatrixAvg,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown instance kind {s:?}")))
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Generator parameters. Fields that a kind does not use are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub p: u32,
    pub n: usize,
    /// Target mean for `random-profile`, success on good inputs for `coset`.
    pub alpha: Option<f64>,
    /// Normal vector of the coset; `e_0` when absent.
    pub coset_a: Option<Vec<u32>>,
    pub coset_c: u32,
    pub policy: Policy,
    /// Use the identity instead of a random matrix.
    pub identity: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            p: 2,
            n: 4,
            alpha: None,
            coset_a: None,
            coset_c: 1,
            policy: Policy::default(),
            identity: false,
        }
    }
}

fn random_matrix(space: FpSpace, rng: &mut ChaCha8Rng) -> Result<FpMatrix> {
    let n = space.n();
    let p = space.p();
    FpMatrix::from_row_major(space.field(), n, n, (0..n * n).map(|_| rng.random_range(0..p)).collect())
}

/// Builds a seeded instance file of the given kind.
pub fn generate_instance(kind: InstanceKind, params: &GenParams, seed: u64) -> Result<Instance> {
    let space = FpSpace::with_modulus(params.p, params.n)?;
    let mut mrng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 11]));
    let mut prng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, 12]));
    let m = if params.identity {
        FpMatrix::identity(space.field(), params.n)
    } else {
        random_matrix(space, &mut mrng)?
    };
    let mut rule = None;
    let profile = match kind {
        InstanceKind::HalfSpace => half_space_profile(space, 1.0, 0.0)?,
        InstanceKind::FootnoteAdversary => footnote_adversary(space),
        InstanceKind::RandomProfile => random_profile(space, params.alpha.unwrap_or(0.25), &mut prng)?,
        InstanceKind::Coset => {
            let a = match &params.coset_a {
                Some(e) => FpVector::from_slice(params.p, e)?,
                None if params.n > 0 => FpVector::basis(space.field(), params.n, 0),
                None => return Err(Error::InvalidParameter("coset needs n >= 1".into())),
            };
            if a.is_zero() {
                return Err(Error::InvalidParameter("coset normal vector is zero: the coset is empty or everything".into()));
            }
            let inside = params.alpha.map(|a| (a * params.p as f64).min(1.0)).unwrap_or(0.9);
            coset_profile(space, &a, params.coset_c, inside, 0.0)?
        }
        InstanceKind::MatrixAvg => {
            if params.n == 0 {
                return Err(Error::InvalidParameter("matrix-avg needs n >= 1".into()));
            }
            rule = Some(MatrixRule::EntryZero { row: 0, col: 0 });
            SuccessProfile::constant(space, params.alpha.unwrap_or(1.0))?
        }
    };
    let planted = crate::avgcase::PlantedAlg::new(&m, profile, params.policy.clone())?;
    let mut inst = Instance::from_planted(&planted, seed);
    inst.matrix_rule = rule;
    Ok(inst)
}
