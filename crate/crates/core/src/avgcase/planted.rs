use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::profile::SuccessProfile;
use crate::error::{Error, Result};
use crate::ff::{matvec, FpMatrix, FpVector};
use crate::qsim::{CMatrix, Gate, Layout};
use crate::space::FpSpace;

/// Cap on `p^{3n}` when materializing every per-input block.
const BLOCK_BUDGET: usize = 1 << 24;

/// Where the failure amplitude of a planted algorithm goes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    /// Spread evenly over every wrong output.
    UniformWrong,
    /// All on `Mv + e_0`.
    #[default]
    SingleAdjacentWrong,
    /// All on the listed output (mixed-radix index), one entry per input.
    Custom(Vec<usize>),
}

/// An average-case algorithm for `v ↦ Mv` that is correct on input `v` with probability `p_v`.
#[derive(Clone, Debug)]
pub struct PlantedAlg {
    space: FpSpace,
    m: FpMatrix,
    mv: Vec<usize>,
    profile: SuccessProfile,
    policy: Policy,
}

pub fn make_planted_alg(m: &FpMatrix, profile: SuccessProfile, policy: Policy) -> Result<PlantedAlg> {
    PlantedAlg::new(m, profile, policy)
}

impl PlantedAlg {
    pub fn new(m: &FpMatrix, profile: SuccessProfile, policy: Policy) -> Result<Self> {
        let space = profile.space();
        if m.rows() != space.n() || m.cols() != space.n() || m.field() != space.field() {
            return Err(Error::DimensionMismatch {
                expected: space.n(),
                found: m.rows(),
            });
        }
        let mut mv = Vec::with_capacity(space.size());
        for v in space.vectors() {
            mv.push(space.index_of(&matvec(m, &v)?));
        }
        if let Policy::Custom(wrong) = &policy {
            if wrong.len() != space.size() {
                return Err(Error::Policy(format!("custom policy lists {} outputs for {} inputs", wrong.len(), space.size())));
            }
            for (v, (&w, &good)) in wrong.iter().zip(&mv).enumerate() {
                if w >= space.size() {
                    return Err(Error::Policy(format!("output {w} for input {v} is out of range")));
                }
                if w == good && profile.at(v) < 1.0 {
                    return Err(Error::Policy(format!("failure mass for input {v} lands on Mv")));
                }
            }
        }
        if space.size() == 1 && profile.values().iter().any(|&p| p < 1.0) {
            return Err(Error::Policy("no wrong output exists in a zero-dimensional space".into()));
        }
        Ok(PlantedAlg {
            space,
            m: m.clone(),
            mv,
            profile,
            policy,
        })
    }

    pub fn space(&self) -> FpSpace {
        self.space
    }

    pub fn matrix(&self) -> &FpMatrix {
        &self.m
    }

    pub fn profile(&self) -> &SuccessProfile {
        &self.profile
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    /// Index of `Mv` for input index `v`.
    pub fn correct(&self, v: usize) -> usize {
        self.mv[v]
    }

    fn wrong_output(&self, v: usize) -> usize {
        match &self.policy {
            Policy::Custom(w) => w[v],
            _ => {
                let mut d = self.space.digits(self.mv[v]);
                d[0] = (d[0] + 1) % self.space.p();
                self.space.index_of_digits(&d)
            }
        }
    }

    /// Output amplitudes on input `|v, 0⟩`.
    pub fn amplitudes(&self, v: usize) -> Vec<Complex64> {
        let size = self.space.size();
        let p = self.profile.at(v);
        let mut amps = vec![Complex64::new(0.0, 0.0); size];
        amps[self.mv[v]] = Complex64::new(p.sqrt(), 0.0);
        if p < 1.0 {
            match self.policy {
                Policy::UniformWrong => {
                    let a = ((1.0 - p) / (size - 1) as f64).sqrt();
                    for (z, x) in amps.iter_mut().enumerate() {
                        if z != self.mv[v] {
                            *x = Complex64::new(a, 0.0);
                        }
                    }
                }
                _ => amps[self.wrong_output(v)] = Complex64::new((1.0 - p).sqrt(), 0.0),
            }
        }
        amps
    }

    pub fn output_distribution(&self, v: usize) -> Vec<f64> {
        self.amplitudes(v).iter().map(|a| a.norm_sqr()).collect()
    }

    /// Runs the algorithm once on `v` and measures its output.
    pub fn sample<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> FpVector {
        self.space.vector(self.sample_index(v, rng))
    }

    /// Index of one measured output on input `v`.
    pub fn sample_index<R: Rng + ?Sized>(&self, v: usize, rng: &mut R) -> usize {
        if rng.random::<f64>() < self.profile.at(v) {
            return self.mv[v];
        }
        match self.policy {
            Policy::UniformWrong => {
                let k = rng.random_range(0..self.space.size() - 1);
                if k >= self.mv[v] {
                    k + 1
                } else {
                    k
                }
            }
            _ => self.wrong_output(v),
        }
    }

    /// Unitary on the output register whose first column is `amplitudes(v)`.
    pub fn block(&self, v: usize) -> CMatrix {
        complete_unitary(&self.amplitudes(v))
    }

    /// `Σ_v |v⟩⟨v| ⊗ block(v)` on the given wires, labeled `ALG`.
    pub fn select_gate(&self, layout: &Layout, inputs: &[usize], outputs: &[usize]) -> Result<Gate> {
        let size = self.space.size();
        if size.saturating_mul(size).saturating_mul(size) > BLOCK_BUDGET {
            return Err(Error::DomainTooLarge(size));
        }
        if layout.joint_dim(inputs) != size || layout.joint_dim(outputs) != size {
            return Err(Error::Wire("ALG wires do not match the input space".into()));
        }
        let blocks = (0..size).map(|v| self.block(v)).collect();
        Ok(Gate::select(layout, inputs.to_vec(), outputs.to_vec(), blocks)?.labeled("ALG"))
    }
}

/// Gram–Schmidt completion of a unit column to a unitary, adding basis states in index order.
pub fn complete_unitary(first: &[Complex64]) -> CMatrix {
    let d = first.len();
    let mut cols: Vec<Vec<Complex64>> = vec![first.to_vec()];
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let mut e = vec![Complex64::new(0.0, 0.0); d];
        e[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let dot: Complex64 = c.iter().zip(&e).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in e.iter_mut().zip(c) {
                    *x -= dot * a;
                }
            }
        }
        let norm = e.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(e.into_iter().map(|x| x / norm).collect());
        }
    }
    CMatrix::from_fn(d, d, |r, c| cols[c][r])
}

/// Which matrices a two-sided algorithm handles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixRule {
    All,
    /// Matrices with a zero at `(row, col)`.
    EntryZero { row: usize, col: usize },
}

impl MatrixRule {
    pub fn good(&self, m: &FpMatrix) -> bool {
        match *self {
            MatrixRule::All => true,
            MatrixRule::EntryZero { row, col } => m.get(row, col) == 0,
        }
    }

    /// Fraction of matrices over `F_p` that are good.
    pub fn density(&self, p: u32) -> f64 {
        match self {
            MatrixRule::All => 1.0,
            MatrixRule::EntryZero { .. } => 1.0 / p as f64,
        }
    }
}

/// Serialized instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub p: u32,
    pub n: usize,
    #[serde(rename = "M")]
    pub m: Vec<u32>,
    pub profile: Vec<f64>,
    pub policy: Policy,
    pub seed: u64,
    /// Present for two-sided instances: the algorithm also depends on `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_rule: Option<MatrixRule>,
}

impl Instance {
    pub fn from_planted(alg: &PlantedAlg, seed: u64) -> Self {
        let space = alg.space();
        Instance {
            p: space.p(),
            n: space.n(),
            m: alg.matrix().row_major().to_vec(),
            profile: alg.profile().values().to_vec(),
            policy: alg.policy().clone(),
            seed,
            matrix_rule: None,
        }
    }

    pub fn space(&self) -> Result<FpSpace> {
        FpSpace::with_modulus(self.p, self.n)
    }

    pub fn matrix(&self) -> Result<FpMatrix> {
        FpMatrix::from_row_major(self.space()?.field(), self.n, self.n, self.m.clone())
    }

    pub fn planted(&self) -> Result<PlantedAlg> {
        let space = self.space()?;
        PlantedAlg::new(&self.matrix()?, SuccessProfile::new(space, self.profile.clone())?, self.policy.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Instance::from_json(&std::fs::read_to_string(path)?)
    }
}
