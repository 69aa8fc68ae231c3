use std::process::Command;

use linred::harness::{
    execute, generate_instance, run, ExperimentSpec, GenParams, InstanceKind, InstanceSource, Suite,
};
use linred::reduction::{Mode, ReductionConfig, Reducer};
use std::sync::Arc;

fn params(p: u32, n: usize) -> GenParams {
    GenParams {
        p,
        n,
        ..GenParams::default()
    }
}

fn mean(inst: &linred::avgcase::Instance) -> f64 {
    inst.profile.iter().sum::<f64>() / inst.profile.len() as f64
}

#[test]
fn generator_examples() {
    let fa = generate_instance(InstanceKind::FootnoteAdversary, &params(2, 4), 1).unwrap();
    assert_eq!(mean(&fa), 0.5);

    for seed in 0..5 {
        let mut gp = params(2, 6);
        gp.alpha = Some(0.25);
        let rp = generate_instance(InstanceKind::RandomProfile, &gp, seed).unwrap();
        assert!((mean(&rp) - 0.25).abs() <= 0.02);
    }

    let mut gp = params(2, 3);
    gp.coset_a = Some(vec![0, 0, 0]);
    assert!(generate_instance(InstanceKind::Coset, &gp, 0).is_err());

    let co = generate_instance(InstanceKind::Coset, &params(2, 4), 0).unwrap();
    assert!((mean(&co) - 0.45).abs() < 1e-12);

    let ma = generate_instance(InstanceKind::MatrixAvg, &params(3, 2), 0).unwrap();
    assert!(ma.matrix_rule.is_some());
    let back = linred::avgcase::Instance::from_json(&ma.to_json().unwrap()).unwrap();
    assert_eq!(back, ma);
}

#[test]
fn generation_is_deterministic() {
    for kind in ["half-space", "footnote-adversary", "random-profile", "coset", "matrix-avg"] {
        let kind: InstanceKind = kind.parse().unwrap();
        let a = generate_instance(kind, &params(2, 4), 9).unwrap();
        let b = generate_instance(kind, &params(2, 4), 9).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}

fn end_to_end_spec(seeds: u64) -> ExperimentSpec {
    ExperimentSpec {
        suite: Suite::EndToEnd,
        instances: vec![InstanceSource::Generate {
            kind: InstanceKind::FootnoteAdversary,
            params: params(2, 3),
            seed: 4,
        }],
        seeds,
        seed: 5,
        ..ExperimentSpec::default()
    }
}

#[test]
fn end_to_end_suite_passes_for_every_input() {
    let rep = execute(&end_to_end_spec(20)).unwrap();
    assert!(rep.passed, "{:?}", rep.violations);
    assert_eq!(rep.row_count, 8 * 20);
    assert_eq!(rep.rates.len(), 8);
    assert!(rep.rates.iter().all(|r| r.success_rate >= 0.9));
}

#[test]
fn row_query_counts_match_counters() {
    let spec = end_to_end_spec(3);
    let rep = execute(&spec).unwrap();
    let InstanceSource::Generate { kind, params, seed } = &spec.instances[0] else { unreachable!() };
    let inst = generate_instance(*kind, params, *seed).unwrap();
    let alg = Arc::new(inst.planted().unwrap());
    let mut red = Reducer::new(alg.clone(), ReductionConfig::new(0.5, 0.1, Mode::Idealized)).unwrap();
    for row in &rep.rows {
        let out = red.run(row.v, row.seed).unwrap();
        assert_eq!(row.queries_um, out.trace.queries.both("U_M"));
        assert_eq!(row.queries_alg, out.trace.queries.get("ALG"));
        assert_eq!(row.attempts, out.trace.attempts.len());
    }
}

#[test]
fn bogolyubov_suite_rows() {
    let spec = ExperimentSpec {
        suite: Suite::Bogolyubov,
        ns: vec![4, 5],
        alphas: vec![0.5, 0.9],
        sets: 5,
        ..ExperimentSpec::default()
    };
    let rep = execute(&spec).unwrap();
    assert_eq!(rep.bogolyubov_rows.len(), 20);
    assert!(rep.passed);
    for r in &rep.bogolyubov_rows {
        assert!(r.min_decomposition_prob >= r.alpha5);
    }
}

#[test]
fn empty_sweep_is_a_pass() {
    let dir = tempfile::tempdir().unwrap();
    let rep = run(&ExperimentSpec::default(), dir.path(), true).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.row_count, 0);
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn outputs_are_byte_identical_without_timestamp() {
    let spec = end_to_end_spec(4);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(&spec, a.path(), true).unwrap();
    run(&spec, b.path(), true).unwrap();
    for f in ["results.csv", "report.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    run(&spec, b.path(), false).unwrap();
    let stamped = std::fs::read_to_string(b.path().join("results.csv")).unwrap();
    assert!(stamped.starts_with("# generated"));
    let plain = std::fs::read_to_string(a.path().join("results.csv")).unwrap();
    assert_eq!(stamped.split_once('\n').unwrap().1, plain);
}

#[test]
fn config_errors_are_fatal() {
    let mut spec = end_to_end_spec(1);
    spec.alpha = Some(0.9);
    assert!(execute(&spec).is_err());
    spec.alpha = None;
    spec.delta = 1.5;
    assert!(execute(&spec).is_err());
    spec.delta = 0.1;
    spec.instances = vec![InstanceSource::File {
        path: "/nonexistent/instance.json".into(),
    }];
    assert!(execute(&spec).is_err());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linred"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("fa.json");
    let st = cli()
        .args(["gen", "--kind", "footnote-adversary", "--n", "3", "--seed", "2", "--out"])
        .arg(&inst)
        .status()
        .unwrap();
    assert!(st.success());

    let out = dir.path().join("run");
    let st = cli()
        .args(["run", "--suite", "end-to-end", "--seeds", "5", "--seed", "1", "--suppress-timestamp", "--instance"])
        .arg(&inst)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(out.join("results.csv").exists() && out.join("report.json").exists());

    // one boost round and one attempt is too weak to pass on every input
    let spec = dir.path().join("spec.json");
    let mut cfg = ReductionConfig::new(0.5, 0.1, Mode::Idealized);
    cfg.boost_rounds = Some(1);
    cfg.outer_budget = Some(1);
    cfg.epochs = 1;
    let s = ExperimentSpec {
        overrides: Some(cfg),
        ..ExperimentSpec::default()
    };
    std::fs::write(&spec, serde_json::to_string(&s).unwrap()).unwrap();
    let st = cli()
        .args(["run", "--seeds", "10", "--suppress-timestamp", "--spec"])
        .arg(&spec)
        .arg("--instance")
        .arg(&inst)
        .arg("--out")
        .arg(dir.path().join("weak"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(1));

    let st = cli().args(["gen", "--kind", "coset", "--n", "3", "--coset-a", "0,0,0"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));

    let st = cli().args(["qsvt-poly", "--t", "0.5", "--width", "0.2", "--eps", "0.01"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&st.stdout).unwrap();
    assert_eq!(doc["pass"], true);

    let st = cli().args(["verify", "--v", "3", "--instance"]).arg(&inst).output().unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&st.stdout).unwrap();
    assert!((doc["accept_probability"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let st = cli().args(["fourier", "--instance"]).arg(&inst).output().unwrap();
    let text = String::from_utf8(st.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
}
