use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use linred::avgcase::{Instance, Policy};
use linred::error::{Error, Result};
use linred::ff::FpVector;
use linred::fourier::indicator_spectrum;
use linred::harness::{self, ExperimentSpec, GenParams, InstanceKind, InstanceSource, Suite};
use linred::qsub::{accept_probability, q_verify, verify_cost, verify_schedule};
use linred::qsvt::threshold_polynomial;
use linred::reduction::Mode;

#[derive(Parser)]
#[command(name = "linred", version, about = "Worst-case to average-case reduction lab for linear problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run an experiment sweep and write results.csv and report.json.
    Run(RunArgs),
    /// Dump the Fourier spectrum of an instance's threshold set.
    Fourier(FourierArgs),
    /// Dump a threshold polynomial and its grid check.
    QsvtPoly(PolyArgs),
    /// Run a single verification query for (M, v, b).
    Verify(VerifyArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: InstanceKind,
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Target mean (random-profile) or density scale (coset, matrix-avg).
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated coset normal vector.
    #[arg(long, value_delimiter = ',')]
    coset_a: Option<Vec<u32>>,
    #[arg(long, default_value_t = 1)]
    coset_c: u32,
    #[arg(long, default_value = "single-adjacent-wrong")]
    policy: String,
    /// Use the identity matrix.
    #[arg(long)]
    identity: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec as JSON; flags below override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    suite: Option<Suite>,
    /// Instance file; repeatable.
    #[arg(long)]
    instance: Vec<PathBuf>,
    /// Generate an instance of this kind instead of reading a file.
    #[arg(long)]
    kind: Option<InstanceKind>,
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Dimensions for generated instances; comma-separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    gen_alpha: Option<f64>,
    #[arg(long)]
    identity: bool,
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    /// Inputs to run as mixed-radix indices; comma-separated.
    #[arg(long, value_delimiter = ',')]
    inputs: Option<Vec<usize>>,
    /// Bogolyubov densities; comma-separated.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long)]
    sets: Option<usize>,
    /// Allow fields below 10/alpha in the large-field suite.
    #[arg(long)]
    no_gate: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    suppress_timestamp: bool,
}

#[derive(Args)]
struct FourierArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Threshold; `alpha / 2` when absent.
    #[arg(long)]
    tau: Option<f64>,
    /// Defaults to the instance's mean success.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PolyArgs {
    #[arg(long)]
    t: f64,
    /// Full width of the transition band.
    #[arg(long)]
    width: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Input as a mixed-radix index.
    #[arg(long)]
    v: usize,
    /// Claimed product, comma-separated; `Mv` when absent.
    #[arg(long, value_delimiter = ',')]
    b: Option<Vec<u32>>,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    #[arg(long, default_value = "circuit")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_policy(s: &str) -> Result<Policy> {
    Ok(serde_json::from_value(json!(s)).map_err(|_| Error::Policy(format!("unknown policy {s:?}")))?)
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let params = GenParams {
        p: a.p,
        n: a.n,
        alpha: a.alpha,
        coset_a: a.coset_a,
        coset_c: a.coset_c,
        policy: parse_policy(&a.policy)?,
        identity: a.identity,
    };
    let inst = harness::generate_instance(a.kind, &params, a.seed)?;
    emit(&a.out, &(inst.to_json()? + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn run(a: RunArgs) -> Result<ExitCode> {
    let mut spec = match &a.spec {
        Some(p) => ExperimentSpec::load(p)?,
        None => ExperimentSpec::default(),
    };
    if let Some(s) = a.suite {
        spec.suite = s;
    }
    for p in &a.instance {
        spec.instances.push(InstanceSource::File { path: p.clone() });
    }
    if let Some(kind) = a.kind {
        for &n in a.n.as_deref().unwrap_or(&[4]) {
            spec.instances.push(InstanceSource::Generate {
                kind,
                params: GenParams {
                    p: a.p,
                    n,
                    alpha: a.gen_alpha,
                    identity: a.identity,
                    ..GenParams::default()
                },
                seed: a.seed.unwrap_or(spec.seed),
            });
        }
    } else if let Some(ns) = &a.n {
        spec.ns = ns.clone();
    }
    if let Some(v) = a.seeds {
        spec.seeds = v;
    }
    if let Some(v) = a.seed {
        spec.seed = v;
    }
    if let Some(v) = a.mode {
        spec.mode = v;
    }
    if a.alpha.is_some() {
        spec.alpha = a.alpha;
    }
    if let Some(v) = a.delta {
        spec.delta = v;
    }
    if a.inputs.is_some() {
        spec.inputs = a.inputs;
    }
    if let Some(v) = a.alphas {
        spec.alphas = v;
    }
    if let Some(v) = a.sets {
        spec.sets = v;
    }
    if a.no_gate {
        spec.enforce_gate = false;
    }
    let report = harness::run(&spec, &a.out, a.suppress_timestamp)?;
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    eprintln!(
        "{} rows, {} violations, wrote {}",
        report.row_count,
        report.violations.len(),
        a.out.display()
    );
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn fourier(a: FourierArgs) -> Result<ExitCode> {
    let inst = Instance::load(&a.instance)?;
    let alg = inst.planted()?;
    let alpha = a.alpha.unwrap_or_else(|| alg.profile().mean());
    let tau = a.tau.unwrap_or(alpha / 2.0);
    let x = alg.profile().threshold_set(tau);
    let spec = indicator_spectrum(&x);
    let mut text = String::from("y,abs,re,im\n");
    for (y, c) in spec.coeffs().iter().enumerate() {
        text += &format!("{y},{},{},{}\n", c.norm(), c.re, c.im);
    }
    emit(&a.out, &text)?;
    eprintln!("tau = {tau}, |X_tau| = {}, density {}", x.len(), x.density());
    Ok(ExitCode::SUCCESS)
}

fn qsvt_poly(a: PolyArgs) -> Result<ExitCode> {
    let tp = threshold_polynomial(a.t, a.width, a.eps)?;
    let pass = tp.high_min >= 1.0 - a.eps && tp.low_max <= a.eps && tp.sup <= 1.0;
    let doc = json!({
        "t": tp.t,
        "width": tp.delta,
        "eps": tp.eps,
        "degree": tp.degree,
        "constant": tp.constant,
        "high_min": tp.high_min,
        "low_max": tp.low_max,
        "sup": tp.sup,
        "pass": pass,
        "chebyshev_coeffs": tp.poly.coeffs,
    });
    emit(&a.out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let inst = Instance::load(&a.instance)?;
    let space = inst.space()?;
    let m = inst.matrix()?;
    if a.v >= space.size() {
        return Err(Error::InvalidParameter(format!("input {} outside the domain", a.v)));
    }
    let v = space.vector(a.v);
    let b = match &a.b {
        Some(e) => FpVector::from_slice(space.p(), e)?,
        None => linred::ff::matvec(&m, &v)?,
    };
    let (prob, mismatches, cost) = match a.mode {
        Mode::Circuit => {
            let o = q_verify(&m, &v, &b, a.eps)?;
            (o.accept_probability, o.mismatches, o.cost)
        }
        Mode::Idealized => {
            let fp = verify_schedule(space.n(), a.eps)?;
            let mism = linred::ff::matvec(&m, &v)?.sub(&b)?.weight();
            (accept_probability(&fp, space.n(), mism), mism, verify_cost(&fp, space.n()))
        }
    };
    let accepted = ChaCha8Rng::seed_from_u64(a.seed).random::<f64>() < prob;
    let doc = json!({
        "v": a.v,
        "b": b.entries(),
        "mismatches": mismatches,
        "accept_probability": prob,
        "accepted": accepted,
        "queries": cost.counts(),
    });
    emit(&a.out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Gen(a) => gen(a),
        Cmd::Run(a) => run(a),
        Cmd::Fourier(a) => fourier(a),
        Cmd::QsvtPoly(a) => qsvt_poly(a),
        Cmd::Verify(a) => verify(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
