use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{generate_instance, GenParams, InstanceKind};
use crate::additive::verify_robust_bogolyubov;
use crate::avgcase::{Instance, MatrixRule, PlantedAlg, SuccessProfile};
use crate::error::{Error, Result};
use crate::ff::matvec;
use crate::fourier::{indicator_spectrum, spec_threshold};
use crate::qsim::QueryCounter;
use crate::reduction::{
    derive_seed, large_field_reduce, matrix_shift_reduce, Mode, ReductionConfig, Reducer, TwoSidedAlg,
};
use crate::space::{FpSet, FpSpace};

/// Rows beyond this are refused.
pub const MAX_ROWS: usize = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    EndToEnd,
    Bogolyubov,
    MatrixShift,
    LargeField,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "end-to-end" => Ok(Suite::EndToEnd),
            "bogolyubov" => Ok(Suite::Bogolyubov),
            "matrix-shift" => Ok(Suite::MatrixShift),
            "large-field" => Ok(Suite::LargeField),
            _ => Err(Error::InvalidParameter(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "source")]
pub enum InstanceSource {
    File { path: PathBuf },
    Generate { kind: InstanceKind, params: GenParams, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub suite: Suite,
    pub instances: Vec<InstanceSource>,
    pub mode: Mode,
    /// Premise `α`; each instance's mean success when absent.
    pub alpha: Option<f64>,
    pub delta: f64,
    /// Seeds per input.
    pub seeds: u64,
    pub seed: u64,
    /// Inputs to run, as mixed-radix indices; every input when absent.
    pub inputs: Option<Vec<usize>>,
    /// Refuse fields below `10/α` in the large-field suite.
    pub enforce_gate: bool,
    /// Bogolyubov sweep: dimensions, densities and sets per cell, over `F_2`.
    pub ns: Vec<usize>,
    pub alphas: Vec<f64>,
    pub sets: usize,
    /// Overrides applied on top of `ReductionConfig::new`.
    pub overrides: Option<ReductionConfig>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            suite: Suite::EndToEnd,
            instances: Vec::new(),
            mode: Mode::Idealized,
            alpha: None,
            delta: 0.1,
            seeds: 20,
            seed: 0,
            inputs: None,
            enforce_gate: true,
            ns: vec![4, 5, 6],
            alphas: vec![0.5, 0.75, 0.9],
            sets: 100,
            overrides: None,
        }
    }
}

impl ExperimentSpec {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {} outside (0, 1)", self.delta)));
        }
        for src in &self.instances {
            if let InstanceSource::File { path } = src {
                if !path.exists() {
                    return Err(Error::InvalidParameter(format!("instance file {} does not exist", path.display())));
                }
            }
        }
        if self.suite == Suite::Bogolyubov {
            if self.alphas.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
                return Err(Error::InvalidParameter("bogolyubov densities must lie in (0, 1]".into()));
            }
            let cells = self.ns.len() * self.alphas.len() * self.sets;
            if cells > MAX_ROWS {
                return Err(Error::InvalidParameter(format!("sweep of {cells} rows is too large")));
            }
        }
        Ok(())
    }
}

/// One `(instance, v, seed)` outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub instance_id: String,
    pub n: usize,
    pub p: u32,
    pub alpha: f64,
    pub v: usize,
    pub seed: u64,
    pub success: u8,
    #[serde(rename = "queries_UM")]
    pub queries_um: u64,
    #[serde(rename = "queries_ALG")]
    pub queries_alg: u64,
    pub attempts: usize,
    pub mode: Mode,
}

/// One seeded set of the Bogolyubov sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BogolyubovRow {
    pub instance_id: String,
    pub n: usize,
    pub p: u32,
    pub alpha: f64,
    pub seed: u64,
    pub density: f64,
    pub r_size: usize,
    pub subspace_dim: usize,
    pub dim_bound: f64,
    pub vacuous: u8,
    pub min_decomposition_prob: f64,
    pub alpha5: f64,
    pub holds: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputRate {
    pub instance_id: String,
    pub v: usize,
    pub runs: u64,
    pub success_rate: f64,
    pub wrong_returns: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct QueryStats {
    pub mean: f64,
    pub max: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub suite: Suite,
    pub mode: Mode,
    pub delta: f64,
    pub seeds: u64,
    pub row_count: usize,
    pub rates: Vec<InputRate>,
    pub min_success_rate: Option<f64>,
    pub wrong_returns: u64,
    /// Keyed by oracle label.
    pub queries: BTreeMap<String, QueryStats>,
    pub violations: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
    #[serde(skip)]
    pub rows: Vec<Row>,
    #[serde(skip)]
    pub bogolyubov_rows: Vec<BogolyubovRow>,
}

struct Loaded {
    id: String,
    inst: Instance,
}

fn load_instances(spec: &ExperimentSpec) -> Result<Vec<Loaded>> {
    spec.instances
        .iter()
        .enumerate()
        .map(|(i, src)| match src {
            InstanceSource::File { path } => Ok(Loaded {
                id: path.file_stem().map_or_else(|| format!("instance{i}"), |s| s.to_string_lossy().into_owned()),
                inst: Instance::load(path)?,
            }),
            InstanceSource::Generate { kind, params, seed } => Ok(Loaded {
                id: format!("{kind}-p{}-n{}-s{seed}", params.p, params.n),
                inst: generate_instance(*kind, params, *seed)?,
            }),
        })
        .collect()
}

/// Per-row outcome before aggregation.
struct Cell {
    row: Row,
    wrong: bool,
    queries: QueryCounter,
}

fn row(id: &str, space: FpSpace, alpha: f64, v: usize, seed: u64, mode: Mode) -> Row {
    Row {
        instance_id: id.to_string(),
        n: space.n(),
        p: space.p(),
        alpha,
        v,
        seed,
        success: 0,
        queries_um: 0,
        queries_alg: 0,
        attempts: 0,
        mode,
    }
}

fn finish(mut r: Row, result: Option<usize>, truth: usize, attempts: usize, queries: QueryCounter) -> Cell {
    r.success = (result == Some(truth)) as u8;
    r.attempts = attempts;
    r.queries_um = queries.both("U_M");
    r.queries_alg = queries.get("ALG");
    Cell {
        row: r,
        wrong: result.is_some_and(|b| b != truth),
        queries,
    }
}

fn config(spec: &ExperimentSpec, alpha: f64) -> ReductionConfig {
    let mut cfg = spec.overrides.clone().unwrap_or_else(|| ReductionConfig::new(alpha, spec.delta, spec.mode));
    cfg.alpha = alpha;
    cfg.delta = spec.delta;
    cfg.mode = spec.mode;
    cfg
}

fn inputs(spec: &ExperimentSpec, space: FpSpace) -> Result<Vec<usize>> {
    match &spec.inputs {
        Some(v) => {
            if let Some(&bad) = v.iter().find(|&&x| x >= space.size()) {
                return Err(Error::InvalidParameter(format!("input {bad} outside the domain of size {}", space.size())));
            }
            Ok(v.clone())
        }
        None => Ok((0..space.size()).collect()),
    }
}

fn run_instance(spec: &ExperimentSpec, idx: usize, l: &Loaded) -> Result<Vec<Cell>> {
    let inst = &l.inst;
    let space = inst.space()?;
    let m = inst.matrix()?;
    let profile = SuccessProfile::new(space, inst.profile.clone())?;
    let vs = inputs(spec, space)?;
    let row_seed = |s: u64| derive_seed(&[spec.seed, idx as u64, s]);
    let mut cells = Vec::with_capacity(vs.len() * spec.seeds as usize);
    match spec.suite {
        Suite::EndToEnd => {
            let alg = Arc::new(PlantedAlg::new(&m, profile, inst.policy.clone())?);
            let alpha = spec.alpha.unwrap_or_else(|| alg.profile().mean());
            let mut red = Reducer::new(alg.clone(), config(spec, alpha))?;
            for &v in &vs {
                let truth = alg.correct(v);
                for s in 0..spec.seeds {
                    let seed = row_seed(s);
                    let out = red.run(v, seed)?;
                    let got = out.result.as_ref().map(|b| space.index_of(b));
                    let r = row(&l.id, space, alpha, v, seed, spec.mode);
                    cells.push(finish(r, got, truth, out.trace.attempts.len(), out.trace.queries));
                }
            }
        }
        Suite::MatrixShift => {
            let two = TwoSidedAlg {
                profile,
                policy: inst.policy.clone(),
                rule: inst.matrix_rule.unwrap_or(MatrixRule::All),
            };
            let alpha = spec.alpha.unwrap_or_else(|| two.mean());
            let cfg = config(spec, alpha);
            for &v in &vs {
                let vv = space.vector(v);
                let truth = space.index_of(&matvec(&m, &vv)?);
                for s in 0..spec.seeds {
                    let seed = row_seed(s);
                    let out = matrix_shift_reduce(&two, &m, &vv, &cfg, None, seed)?;
                    let got = out.result.as_ref().map(|b| space.index_of(b));
                    let r = row(&l.id, space, alpha, v, seed, spec.mode);
                    cells.push(finish(r, got, truth, out.draws, out.queries));
                }
            }
        }
        Suite::LargeField => {
            let alg = PlantedAlg::new(&m, profile, inst.policy.clone())?;
            let alpha = spec.alpha.unwrap_or_else(|| alg.profile().mean());
            let cfg = config(spec, alpha);
            for &v in &vs {
                let vv = space.vector(v);
                let truth = alg.correct(v);
                for s in 0..spec.seeds {
                    let seed = row_seed(s);
                    let out = large_field_reduce(&alg, &vv, &cfg, spec.enforce_gate, None, seed)?;
                    let got = out.result.as_ref().map(|b| space.index_of(b));
                    let r = row(&l.id, space, alpha, v, seed, spec.mode);
                    cells.push(finish(r, got, truth, out.attempts, out.queries));
                }
            }
        }
        Suite::Bogolyubov => unreachable!("handled separately"),
    }
    Ok(cells)
}

/// Uniform random set with `ceil(α·|F_2^n|)` elements.
pub fn seeded_set(n: usize, alpha: f64, seed: u64) -> Result<FpSet> {
    let space = FpSpace::with_modulus(2, n)?;
    let size = (alpha * space.size() as f64 - 1e-9).ceil().max(1.0) as usize;
    let mut idx: Vec<usize> = (0..space.size()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut set = FpSet::empty(space);
    for &i in &idx[..size.min(space.size())] {
        set.insert(i);
    }
    Ok(set)
}

fn bogolyubov_rows(spec: &ExperimentSpec) -> Result<Vec<BogolyubovRow>> {
    let mut cells = Vec::new();
    for &n in &spec.ns {
        for &alpha in &spec.alphas {
            for i in 0..spec.sets {
                cells.push((n, alpha, i));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(n, alpha, i)| {
            let seed = derive_seed(&[spec.seed, n as u64, alpha.to_bits(), i as u64]);
            let x = seeded_set(n, alpha, seed)?;
            let r = spec_threshold(&indicator_spectrum(&x), 0.75 * alpha.powf(1.5))?;
            let rep = verify_robust_bogolyubov(&x, &r, alpha)?;
            Ok(BogolyubovRow {
                instance_id: format!("bogolyubov-n{n}-a{alpha}-{i}"),
                n,
                p: 2,
                alpha,
                seed,
                density: rep.density,
                r_size: rep.r_size,
                subspace_dim: rep.subspace_dim,
                dim_bound: rep.dim_lower_bound,
                vacuous: rep.vacuous as u8,
                min_decomposition_prob: rep.min_decomposition_prob,
                alpha5: alpha.powi(5),
                holds: rep.holds() as u8,
            })
        })
        .collect()
}

/// Executes the sweep in memory.
pub fn execute(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let start = Instant::now();
    let mut report = ExperimentReport {
        suite: spec.suite,
        mode: spec.mode,
        delta: spec.delta,
        seeds: spec.seeds,
        row_count: 0,
        rates: Vec::new(),
        min_success_rate: None,
        wrong_returns: 0,
        queries: BTreeMap::new(),
        violations: Vec::new(),
        passed: true,
        wall_time_ms: None,
        rows: Vec::new(),
        bogolyubov_rows: Vec::new(),
    };
    if spec.suite == Suite::Bogolyubov {
        let rows = bogolyubov_rows(spec)?;
        for r in rows.iter().filter(|r| r.holds == 0) {
            report.violations.push(format!("{}: robust Bogolyubov guarantees violated", r.instance_id));
        }
        report.row_count = rows.len();
        report.bogolyubov_rows = rows;
    } else {
        let loaded = load_instances(spec)?;
        let mut rows = 0usize;
        for l in &loaded {
            let size = l.inst.space()?.size();
            let per = spec.inputs.as_ref().map_or(size, |v| v.len());
            rows = rows.saturating_add(per.saturating_mul(spec.seeds as usize));
        }
        if rows > MAX_ROWS {
            return Err(Error::InvalidParameter(format!("sweep of {rows} rows is too large")));
        }
        let per: Vec<Vec<Cell>> = loaded
            .par_iter()
            .enumerate()
            .map(|(i, l)| run_instance(spec, i, l))
            .collect::<Result<_>>()?;
        let cells: Vec<Cell> = per.into_iter().flatten().collect();
        aggregate(&mut report, &cells);
        report.rows = cells.into_iter().map(|c| c.row).collect();
    }
    report.passed = report.violations.is_empty();
    report.wall_time_ms = Some(start.elapsed().as_millis());
    Ok(report)
}

fn aggregate(report: &mut ExperimentReport, cells: &[Cell]) {
    let mut by_input: BTreeMap<(String, usize), (u64, u64, u64)> = BTreeMap::new();
    let mut totals: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for c in cells {
        let e = by_input.entry((c.row.instance_id.clone(), c.row.v)).or_default();
        e.0 += 1;
        e.1 += c.row.success as u64;
        e.2 += c.wrong as u64;
        for (k, &q) in c.queries.counts() {
            let t = totals.entry(k.clone()).or_default();
            t.0 += q;
            t.1 = t.1.max(q);
        }
    }
    let threshold = 1.0 - report.delta;
    for ((id, v), (runs, ok, wrong)) in by_input {
        let rate = ok as f64 / runs as f64;
        if rate < threshold {
            report.violations.push(format!("{id} v={v}: success rate {rate:.3} < {threshold:.3}"));
        }
        if wrong > 0 {
            report.violations.push(format!("{id} v={v}: {wrong} wrong returns"));
        }
        report.wrong_returns += wrong;
        report.min_success_rate = Some(report.min_success_rate.map_or(rate, |m: f64| m.min(rate)));
        report.rates.push(InputRate {
            instance_id: id,
            v,
            runs,
            success_rate: rate,
            wrong_returns: wrong,
        });
    }
    let rows = cells.len().max(1) as f64;
    report.queries = totals
        .into_iter()
        .map(|(k, (sum, max))| (k, QueryStats { mean: sum as f64 / rows, max }))
        .collect();
    report.row_count = cells.len();
}

/// Writes `results.csv` and `report.json` under `out`.
///
/// Without `suppress_timestamp` the CSV starts with a `# generated` line and
/// the report carries the wall time.
pub fn write_outputs(report: &ExperimentReport, out: &Path, suppress_timestamp: bool) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut file = std::fs::File::create(out.join("results.csv"))?;
    if !suppress_timestamp {
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(file, "# generated unix={ts}")?;
    }
    let mut w = csv::Writer::from_writer(file);
    if report.suite == Suite::Bogolyubov {
        for r in &report.bogolyubov_rows {
            w.serialize(r)?;
        }
    } else {
        if report.rows.is_empty() {
            w.write_record([
                "instance_id", "n", "p", "alpha", "v", "seed", "success", "queries_UM", "queries_ALG", "attempts", "mode",
            ])?;
        }
        for r in &report.rows {
            w.serialize(r)?;
        }
    }
    w.flush()?;
    let mut rep = report.clone();
    if suppress_timestamp {
        rep.wall_time_ms = None;
    }
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&rep)? + "\n")?;
    Ok(())
}

/// `execute` followed by `write_outputs`.
pub fn run(spec: &ExperimentSpec, out: &Path, suppress_timestamp: bool) -> Result<ExperimentReport> {
    let report = execute(spec)?;
    write_outputs(&report, out, suppress_timestamp)?;
    Ok(report)
}
