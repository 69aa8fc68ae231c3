use std::sync::Arc;

use super::*;
use crate::avgcase::{half_space_profile, make_planted_alg, Policy, SuccessProfile};
use crate::ff::{matvec, FpMatrix, FpVector, PrimeField};
use crate::fourier::{fourier_transform_real, indicator_spectrum, spec_threshold};
use crate::qsvt::threshold_polynomial;
use crate::space::{FpSet, FpSpace};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn f2() -> PrimeField {
    PrimeField::new(2).unwrap()
}

fn vec2(p: u32, xs: &[u32]) -> FpVector {
    FpVector::from_slice(p, xs).unwrap()
}

fn space(p: u32, n: usize) -> FpSpace {
    FpSpace::with_modulus(p, n).unwrap()
}

#[test]
fn verify_accepts_correct_product() {
    let m = FpMatrix::identity(f2(), 2);
    let out = q_verify(&m, &vec2(2, &[1, 0]), &vec2(2, &[1, 0]), 0.05).unwrap();
    assert!((out.accept_probability - 1.0).abs() < 1e-9);
}

#[test]
fn verify_rejects_wrong_product() {
    let m = FpMatrix::identity(f2(), 2);
    let out = q_verify(&m, &vec2(2, &[1, 0]), &vec2(2, &[0, 0]), 0.05).unwrap();
    assert!(out.accept_probability <= 0.05);
    assert_eq!(out.mismatches, 1);
}

#[test]
fn verify_single_coordinate() {
    let m = FpMatrix::identity(f2(), 1);
    let eps = 0.05;
    let out = q_verify(&m, &vec2(2, &[1]), &vec2(2, &[0]), eps).unwrap();
    assert!(out.accept_probability <= eps);
}

#[test]
fn verify_circuit_matches_closed_form_and_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (p, n) in [(2u32, 3usize), (3, 2), (5, 2)] {
        let f = PrimeField::new(p).unwrap();
        let m = FpMatrix::from_row_major(f, n, n, (0..n * n).map(|_| rng.random_range(0..p)).collect()).unwrap();
        let v = FpVector::new(f, (0..n).map(|_| rng.random_range(0..p)));
        let mv = matvec(&m, &v).unwrap();
        for k in 0..=n {
            let mut b = mv.clone();
            for i in 0..k {
                b.set(i, (b.get(i) + 1) % p);
            }
            let vc = verify_circuit(&m, &v, &b, 0.1).unwrap();
            let closed = accept_probability(&vc.schedule, n, k);
            assert!((vc.accept_probability() - closed).abs() < 1e-9, "p={p} n={n} k={k}");
            assert_eq!(vc.circuit.query_cost(), verify_cost(&vc.schedule, n));
        }
    }
}

#[test]
fn verify_sampling_agrees_with_amplitudes() {
    let m = FpMatrix::identity(f2(), 2);
    let vc = verify_circuit(&m, &vec2(2, &[1, 1]), &vec2(2, &[1, 1]), 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut qc = crate::qsim::QueryCounter::new();
    for _ in 0..20 {
        assert!(vc.run(&mut rng, &mut qc).unwrap());
    }
    assert_eq!(qc.get("U_M"), 20 * vc.circuit.query_cost().get("U_M"));
}

fn planted(p: u32, n: usize, profile: SuccessProfile, policy: Policy, seed: u64) -> Arc<crate::avgcase::PlantedAlg> {
    let f = PrimeField::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = FpMatrix::from_row_major(f, n, n, (0..n * n).map(|_| rng.random_range(0..p)).collect()).unwrap();
    Arc::new(make_planted_alg(&m, profile, policy).unwrap())
}

#[test]
fn verified_perfect_alg_always_flags() {
    let sp = space(2, 2);
    let alg = planted(2, 2, SuccessProfile::constant(sp, 1.0).unwrap(), Policy::default(), 1);
    let va = alg_verified(alg, 0.1).unwrap();
    for v in 0..4 {
        assert!((va.flag_probability(v) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn verified_catches_single_wrong_output() {
    let sp = space(2, 2);
    let alg = planted(2, 2, SuccessProfile::constant(sp, 0.0).unwrap(), Policy::SingleAdjacentWrong, 2);
    let va = alg_verified(alg, 0.1).unwrap();
    for v in 0..4 {
        assert!(va.flag_probability(v) <= 0.1);
    }
}

#[test]
fn verified_preserves_outputs_and_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (p, n) in [(2u32, 2usize), (3, 2), (2, 3)] {
        let sp = space(p, n);
        let prof = crate::avgcase::random_profile(sp, 0.5, &mut rng).unwrap();
        for policy in [Policy::UniformWrong, Policy::SingleAdjacentWrong] {
            let alg = planted(p, n, prof.clone(), policy, 3);
            let va = alg_verified(alg.clone(), 0.2).unwrap();
            assert_eq!(va.cost(), verified_cost(n, &va.schedule));
            for v in 0..sp.size() {
                let joint = va.joint_distribution(v).unwrap();
                for (z, pz) in alg.output_distribution(v).iter().enumerate() {
                    assert!((joint[z][0] + joint[z][1] - pz).abs() < 1e-9);
                }
                let good = alg.correct(v);
                assert!((joint[good][1] - prof.at(v)).abs() < 1e-9);
                let closed = verified_flag_probability(&alg, &va.schedule, v);
                assert!((va.flag_probability(v) - closed).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn verified_joint_law_from_shots() {
    let sp = space(2, 2);
    let alg = planted(2, 2, SuccessProfile::constant(sp, 0.5).unwrap(), Policy::UniformWrong, 5);
    let va = alg_verified(alg.clone(), 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let v = 3;
    let s = va.run(v);
    let mut wires = va.z_wires.clone();
    wires.push(va.mark);
    let exact = s.distribution(&wires).unwrap();
    let shots = 10_000;
    let mut counts = vec![0usize; exact.len()];
    for _ in 0..shots {
        counts[crate::qsim::sample_index(&exact, &mut rng)] += 1;
    }
    let good = alg.correct(v);
    for z in 0..4 {
        let succ = counts[2 * z + 1] as f64 / shots as f64;
        let fail = counts[2 * z] as f64 / shots as f64;
        if z == good {
            assert!((succ - 0.5).abs() < 0.02 && fail < 0.02);
        } else {
            let share = 0.5 / 3.0;
            assert!((succ + fail - share).abs() < 0.02);
            assert!(succ <= 0.1 * share + 0.02);
        }
    }
}

fn indicator_for(values: Vec<f64>, n: usize, t: f64, eps: f64) -> (IndicatorOracle, Vec<f64>) {
    let sp = space(2, n);
    let alg = planted(2, n, SuccessProfile::new(sp, values).unwrap(), Policy::SingleAdjacentWrong, 8);
    let va = alg_verified(alg, t * t).unwrap();
    let io = indicator_oracle(&va, t, eps).unwrap();
    let q = io.oracle.flag_probabilities();
    (io, q)
}

#[test]
fn indicator_exact_without_wasteland() {
    let eps = 0.05;
    let vals = vec![0.9, 0.05, 0.9, 0.05];
    let (io, q) = indicator_for(vals.clone(), 2, 0.4, eps);
    assert_eq!(io.partition.rho_w, 0.0);
    for (v, &p) in vals.iter().enumerate() {
        if p > 0.5 {
            assert!(q[v] >= 1.0 - 2.0 * eps, "v={v} q={}", q[v]);
        } else {
            assert!(q[v] <= 2.0 * eps, "v={v} q={}", q[v]);
        }
    }
}

#[test]
fn indicator_all_good() {
    let eps = 0.05;
    let (_, q) = indicator_for(vec![1.0; 4], 2, 0.3, eps);
    assert!(q.iter().all(|&x| x >= 1.0 - 2.0 * eps));
}

#[test]
fn indicator_wasteland_is_a_probability() {
    let t: f64 = 0.3;
    let (io, q) = indicator_for(vec![t, 0.9, 0.0, t + 0.5 * t * t], 2, t, 0.05);
    assert!(io.partition.rho_w > 0.0);
    assert!(q.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
}

#[test]
fn indicator_applies_polynomial_to_flag_amplitude() {
    let t = 0.3;
    let sp = space(2, 2);
    let alg = planted(2, 2, SuccessProfile::new(sp, vec![0.2, 0.5, 0.8, 0.35]).unwrap(), Policy::UniformWrong, 3);
    let va = alg_verified(alg, t * t).unwrap();
    let io = indicator_oracle(&va, t, 0.05).unwrap();
    let half = 0.5 * t.powf(1.5) - 0.125 * t.powf(2.5);
    let tp = threshold_polynomial(t.sqrt(), 2.0 * half, 0.05).unwrap();
    let q = io.oracle.flag_probabilities();
    for v in 0..4 {
        let zeta = va.flag_probability(v).sqrt();
        assert!((q[v] - tp.eval(zeta).powi(2)).abs() < 1e-8);
    }
    let per_use = io.oracle.cost.clone();
    assert_eq!(per_use.get("ALG"), io.degree as u64);
}

#[test]
fn bernstein_vazirani() {
    let sp = space(2, 2);
    let a = sp.index_of_digits(&[1, 1]);
    let q: Vec<f64> = (0..4).map(|x| sp.dot(a, x) as f64).collect();
    let gl = gl_fourier_sample(&planted_flag_oracle(sp, &q).unwrap()).unwrap();
    assert!((gl.probs[a] - 1.0).abs() < 1e-12);
}

#[test]
fn half_space_gl_matches_fourier_module() {
    let sp = space(2, 3);
    let x = FpSet::from_predicate(sp, |d| d[0] == 0);
    let gl = gl_fourier_sample(&planted_flag_oracle(sp, &x.indicator()).unwrap()).unwrap();
    let e = sp.index_of_digits(&[1, 0, 0]);
    let spec = indicator_spectrum(&x);
    assert!((gl.probs[e] - 4.0 * spec.at(e).norm_sqr()).abs() < 1e-12);
    assert!((gl.probs[e] - 1.0).abs() < 1e-12);
    assert_eq!(gl.cost.get("U_f"), 2);
}

fn g_hat_sq(x: &FpSet) -> Vec<f64> {
    let g: Vec<f64> = x.indicator().iter().map(|b| 1.0 - 2.0 * b).collect();
    fourier_transform_real(x.space(), &g).unwrap().coeffs().iter().map(|c| c.norm_sqr()).collect()
}

#[test]
fn noisy_gl_within_four_eps() {
    let sp = space(2, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let eps = 0.02;
    for _ in 0..5 {
        let x = FpSet::from_predicate(sp, |_| rng.random::<bool>());
        let q: Vec<f64> = x.indicator().iter().map(|&b| if b > 0.5 { 1.0 - eps } else { eps }).collect();
        let gl = gl_fourier_sample(&planted_flag_oracle(sp, &q).unwrap()).unwrap();
        let exact = g_hat_sq(&x);
        let worst = gl.probs.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(worst <= 4.0 * eps + 1e-9);
        assert!((gl.probs.iter().sum::<f64>() + gl.remainder - 1.0).abs() < 1e-9);
    }
}

#[test]
fn gl_circuit_law_matches_closed_form_on_indicator() {
    let (io, q) = indicator_for(vec![0.9, 0.05, 0.3, 0.7, 0.0, 1.0, 0.5, 0.2], 3, 0.25, 0.1);
    let gl = gl_fourier_sample(&io.oracle).unwrap();
    let ideal = GlDistribution::from_flag_probabilities(io.oracle.space, &q, gl.cost.clone()).unwrap();
    for (a, b) in gl.probs.iter().zip(&ideal.probs) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn learn_half_space_character() {
    let sp = space(2, 4);
    let x = FpSet::from_predicate(sp, |d| d[0] == 0);
    let gl = gl_fourier_sample(&planted_flag_oracle(sp, &x.indicator()).unwrap()).unwrap();
    let c = 0.5f64.powf(1.5);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (r, rep) = learn_heavy_characters(&gl, c, 1.0 / 6.0, None, &mut rng).unwrap();
    assert_eq!(r.members, vec![vec2(2, &[1, 0, 0, 0])]);
    assert!(rep.shots > 0 && rep.frequency_cost.get("U_f") == 2 * rep.shots);
}

#[test]
fn learn_constant_is_empty() {
    let sp = space(2, 3);
    let gl = gl_fourier_sample(&planted_flag_oracle(sp, &[1.0; 8]).unwrap()).unwrap();
    let (r, _) = learn_heavy_characters(&gl, 0.3, 0.1, None, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert!(r.is_empty());
}

#[test]
fn learn_subspace_duals() {
    let sp = space(2, 4);
    let x = FpSet::from_predicate(sp, |d| d[0] == 0 && d[1] == 0);
    let gl = gl_fourier_sample(&planted_flag_oracle(sp, &x.indicator()).unwrap()).unwrap();
    let (r, _) = learn_heavy_characters(&gl, 0.25, 0.1, None, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let expect = spec_threshold(&indicator_spectrum(&x), 0.25).unwrap();
    assert_eq!(r.len(), 3);
    for y in &expect.members {
        assert!(r.contains(y));
    }
}

#[test]
fn learn_respects_budget() {
    let sp = space(2, 2);
    let gl = gl_fourier_sample(&planted_flag_oracle(sp, &[1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
    let err = learn_heavy_characters(&gl, 0.2, 0.1, Some(10), &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
    assert!(matches!(err, crate::error::Error::BudgetExhausted(_)));
}

#[test]
fn sample_half_space_close_to_uniform() {
    let sp = space(2, 4);
    let x = FpSet::from_predicate(sp, |d| d[0] == 0);
    let q: Vec<f64> = x.indicator().iter().map(|&b| if b > 0.5 { 0.98 } else { 0.01 }).collect();
    let o = planted_flag_oracle(sp, &q).unwrap();
    let law = q_sample_law(&o, 0.4, 0.05).unwrap();
    assert!(law.tv_from_uniform(&x) <= 0.05);
    assert!(law.flagged_mass >= 1.0 - 0.05);
}

#[test]
fn sample_full_space_exactly_uniform() {
    let sp = space(3, 2);
    let o = planted_flag_oracle(sp, &[1.0; 9]).unwrap();
    let law = q_sample_law(&o, 1.0, 0.1).unwrap();
    assert!(law.tv_from_uniform(&FpSet::full(sp)) < 1e-12);
}

#[test]
fn sample_singleton() {
    let sp = space(2, 3);
    let (delta, eps) = (0.05, 0.0);
    let mut q = vec![0.0; 8];
    q[5] = 1.0;
    let law = q_sample_law(&planted_flag_oracle(sp, &q).unwrap(), 1.0 / 8.0, delta).unwrap();
    assert!(law.flagged_mass * law.law[5] >= 1.0 - delta - 2.0 * eps);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let hits = (0..1000).filter(|_| law.sample(&mut rng) == Some(5)).count();
    assert!(hits >= 930);
}

#[test]
fn sample_empty_target_detected() {
    let sp = space(2, 2);
    let err = q_sample_law(&planted_flag_oracle(sp, &[0.0; 4]).unwrap(), 0.25, 0.1).unwrap_err();
    assert!(matches!(err, crate::error::Error::EmptyTarget));
}

#[test]
fn sample_circuit_matches_closed_form() {
    let sp = space(3, 2);
    let q = [0.9, 0.1, 0.0, 0.5, 1.0, 0.3, 0.0, 0.7, 0.2];
    let o = planted_flag_oracle(sp, &q).unwrap();
    let law = q_sample_law(&o, 0.3, 0.1).unwrap();
    let ideal = SampleLaw::ideal(sp, &q, &sample_schedule(0.3, 0.1).unwrap(), &o.cost).unwrap();
    assert!((law.flagged_mass - ideal.flagged_mass).abs() < 1e-9);
    for (a, b) in law.law.iter().zip(&ideal.law) {
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(law.cost, ideal.cost);
}

#[test]
fn sampling_oracle_on_planted_alg() {
    let sp = space(2, 2);
    let alg = planted(2, 2, half_space_profile(sp, 0.9, 0.0).unwrap(), Policy::SingleAdjacentWrong, 1);
    let va = alg_verified(alg, 0.01).unwrap();
    let io = sampling_oracle(&va, 0.3, 0.2, 0.02).unwrap();
    let law = q_sample_law(&io.oracle, 0.45, 0.05).unwrap();
    let x = FpSet::from_predicate(sp, |d| d[0] == 0);
    assert!(law.tv_from_uniform(&x) < 0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn verify_is_one_sided(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = f2();
        let m = FpMatrix::from_row_major(f, 2, 2, (0..4).map(|_| rng.random_range(0..2)).collect()).unwrap();
        let v = FpVector::new(f, (0..2).map(|_| rng.random_range(0..2)));
        let b = FpVector::new(f, (0..2).map(|_| rng.random_range(0..2)));
        let out = q_verify(&m, &v, &b, 0.05).unwrap();
        if matvec(&m, &v).unwrap() == b {
            prop_assert!((out.accept_probability - 1.0).abs() < 1e-9);
        } else {
            prop_assert!(out.accept_probability <= 0.05);
        }
    }

    #[test]
    fn learned_set_is_small(seed in any::<u64>(), c in 0.05f64..0.8) {
        let sp = space(2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q: Vec<f64> = (0..16).map(|_| rng.random::<f64>()).collect();
        let gl = GlDistribution::from_flag_probabilities(sp, &q, Default::default()).unwrap();
        let (r, _) = learn_heavy_characters(&gl, c, 0.2, None, &mut rng).unwrap();
        prop_assert!((r.len() as f64) <= 16.0 / (c * c));
    }
}
