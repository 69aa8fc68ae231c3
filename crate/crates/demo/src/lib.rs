//! wasm-bindgen entry points for `www/index.html`.
//!
//! Every export returns a JSON string; failures come back as `{"error": ...}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use linred::avgcase::{footnote_adversary, PlantedAlg, Policy};
use linred::error::{Error, Result};
use linred::ff::{matvec, FpMatrix, FpVector};
use linred::fourier::indicator_spectrum;
use linred::qsub::{accept_probability, verify_cost, verify_schedule};
use linred::reduction::{Mode, ReductionConfig, Reducer};
use linred::space::{FpSet, FpSpace};

/// Largest domain the page will enumerate.
const MAX_DOMAIN: usize = 1 << 12;

fn respond(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::InvalidParameter(format!("not a number: {t:?}"))))
        .collect()
}

fn small_space(p: u32, n: usize) -> Result<FpSpace> {
    let sp = FpSpace::with_modulus(p, n)?;
    if sp.size() > MAX_DOMAIN {
        return Err(Error::DomainTooLarge(sp.size()));
    }
    Ok(sp)
}

fn spectrum(p: u32, n: usize, members: &str) -> Result<Value> {
    let sp = small_space(p, n)?;
    let mut set = FpSet::empty(sp);
    for idx in parse_list(members)? {
        let idx = idx as usize;
        if idx >= sp.size() {
            return Err(Error::InvalidParameter(format!("{idx} is outside F_{p}^{n}")));
        }
        set.insert(idx);
    }
    let spec = indicator_spectrum(&set);
    let mags: Vec<f64> = spec.coeffs().iter().map(|c| c.norm()).collect();
    Ok(json!({ "density": set.density(), "magnitudes": mags }))
}

/// `|1̂_X(y)|` for every `y`, with `X` given as comma-separated mixed-radix indices.
#[wasm_bindgen]
pub fn fourier_spectrum(p: u32, n: usize, members: &str) -> String {
    respond(spectrum(p, n, members))
}

fn verify(p: u32, matrix: &str, v: &str, b: &str, eps: f64) -> Result<Value> {
    let v = FpVector::from_slice(p, &parse_list(v)?)?;
    let n = v.len();
    let entries = parse_list(matrix)?;
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: entries.len(),
        });
    }
    let m = FpMatrix::from_row_major(v.field(), n, n, entries)?;
    let b = FpVector::from_slice(p, &parse_list(b)?)?;
    let mismatches = matvec(&m, &v)?.sub(&b)?.weight();
    let fp = verify_schedule(n, eps)?;
    Ok(json!({
        "mismatches": mismatches,
        "accept_probability": accept_probability(&fp, n, mismatches),
        "rounds": fp.length,
        "queries": verify_cost(&fp, n).counts(),
    }))
}

/// Acceptance probability of the verifier on `(M, v, b)`; `M` is row-major.
#[wasm_bindgen]
pub fn verify_product(p: u32, matrix: &str, v: &str, b: &str, eps: f64) -> String {
    respond(verify(p, matrix, v, b, eps))
}

fn reduce(n: usize, v: usize, seed: u64, delta: f64) -> Result<Value> {
    let sp = small_space(2, n)?;
    if v >= sp.size() {
        return Err(Error::InvalidParameter(format!("input {v} outside F_2^{n}")));
    }
    let m = FpMatrix::identity(sp.field(), n);
    let alg = PlantedAlg::new(&m, footnote_adversary(sp), Policy::SingleAdjacentWrong)?;
    let mut red = Reducer::new(alg.into(), ReductionConfig::new(0.5, delta, Mode::Idealized))?;
    let out = red.run(v, seed)?;
    let t = &out.trace;
    Ok(json!({
        "v": sp.vector(v).entries(),
        "result": out.result.as_ref().map(|r| r.entries().to_vec()),
        "correct": out.result.as_ref().is_some_and(|r| sp.index_of(r) == v),
        "alg_alone": footnote_adversary(sp).at(v),
        "attempts": t.attempts.len(),
        "basis_t": t.epochs.first().map(|e| e.basis_t),
        "queries": t.queries.counts(),
    }))
}

/// Runs the reduction on the footnote adversary over `F_2^n` with `M = I`.
#[wasm_bindgen]
pub fn reduce_footnote(n: usize, v: usize, seed: u64, delta: f64) -> String {
    respond(reduce(n, v, seed, delta))
}
