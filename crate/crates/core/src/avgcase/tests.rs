use super::*;
use crate::ff::{FpMatrix, FpVector, PrimeField};
use crate::fourier::indicator_spectrum;
use crate::qsim::{check_unitary, Layout, QueryCounter, StateVector};
use crate::space::{FpSet, FpSpace};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn space(p: u32, n: usize) -> FpSpace {
    FpSpace::with_modulus(p, n).unwrap()
}

fn random_matrix(f: PrimeField, n: usize, rng: &mut ChaCha8Rng) -> FpMatrix {
    use rand::Rng;
    let data = (0..n * n).map(|_| rng.random_range(0..f.modulus())).collect();
    FpMatrix::from_row_major(f, n, n, data).unwrap()
}

#[test]
fn perfect_alg_outputs_mv() {
    let sp = space(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = random_matrix(sp.field(), 2, &mut rng);
    let alg = make_planted_alg(&m, SuccessProfile::constant(sp, 1.0).unwrap(), Policy::default()).unwrap();
    let l = Layout::new(&[("v0", 3), ("v1", 3), ("z0", 3), ("z1", 3)]).unwrap();
    let g = alg.select_gate(&l, &[0, 1], &[2, 3]).unwrap();
    for v in 0..9 {
        let mut s = StateVector::basis(l.clone(), v * 9);
        let mut qc = QueryCounter::new();
        s.apply(&g, &mut qc);
        let mv = crate::ff::matvec(&m, &sp.vector(v)).unwrap();
        assert!((s.amp(v * 9 + sp.index_of(&mv)).re - 1.0).abs() < 1e-12);
        assert_eq!(qc.get("ALG"), 1);
    }
}

#[test]
fn footnote_adversary_has_mean_half() {
    for n in 1..=6 {
        assert_eq!(footnote_adversary(space(2, n)).mean(), 0.5);
    }
}

#[test]
fn constant_quarter_read_from_amplitudes() {
    let sp = space(2, 3);
    let m = FpMatrix::identity(sp.field(), 3);
    for policy in [Policy::UniformWrong, Policy::SingleAdjacentWrong] {
        let alg = make_planted_alg(&m, SuccessProfile::constant(sp, 0.25).unwrap(), policy).unwrap();
        let mean: f64 = (0..8).map(|v| alg.output_distribution(v)[alg.correct(v)]).sum::<f64>() / 8.0;
        assert!((mean - 0.25).abs() < 1e-12);
    }
}

#[test]
fn blocks_are_unitary_and_reproduce_profile() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, n) in [(2, 3), (3, 2), (5, 1)] {
        let sp = space(p, n);
        let m = random_matrix(sp.field(), n, &mut rng);
        let prof = random_profile(sp, 0.4, &mut rng).unwrap();
        for policy in [Policy::UniformWrong, Policy::SingleAdjacentWrong] {
            let alg = make_planted_alg(&m, prof.clone(), policy).unwrap();
            for v in 0..sp.size() {
                let b = alg.block(v);
                check_unitary(&b).unwrap();
                let defect = (b.adjoint() * &b - crate::qsim::CMatrix::identity(sp.size(), sp.size())).norm();
                assert!(defect < 1e-9);
                assert!((b[(alg.correct(v), 0)].norm_sqr() - prof.at(v)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn failure_on_mv_is_rejected() {
    let sp = space(2, 2);
    let m = FpMatrix::identity(sp.field(), 2);
    let prof = SuccessProfile::constant(sp, 0.5).unwrap();
    let err = make_planted_alg(&m, prof.clone(), Policy::Custom(vec![0, 1, 2, 3])).unwrap_err();
    assert!(matches!(err, crate::error::Error::Policy(_)));
    assert!(make_planted_alg(&m, prof, Policy::Custom(vec![1, 0, 3, 2])).is_ok());
}

#[test]
fn adjacent_wrong_differs_in_first_coordinate() {
    let sp = space(3, 2);
    let m = FpMatrix::identity(sp.field(), 2);
    let alg = make_planted_alg(&m, SuccessProfile::constant(sp, 0.0).unwrap(), Policy::SingleAdjacentWrong).unwrap();
    let dist = alg.output_distribution(sp.index_of_digits(&[2, 1]));
    assert_eq!(dist[sp.index_of_digits(&[0, 1])], 1.0);
}

#[test]
fn threshold_set_examples() {
    let sp = space(2, 3);
    let prof = half_space_profile(sp, 0.8, 0.1).unwrap();
    assert_eq!(threshold_set(&prof, 0.5), FpSet::from_predicate(sp, |d| d[0] == 0));
    assert_eq!(threshold_set(&prof, 0.1).len(), 8);
    assert!(threshold_set(&prof, 0.81).is_empty());
}

#[test]
fn density_claim_examples() {
    let sp = space(2, 4);
    let r = verify_density(&footnote_adversary(sp), 0.5).unwrap();
    assert!(r.holds);
    assert_eq!(threshold_set(&footnote_adversary(sp), 0.25).len(), 8);

    let r = verify_density(&SuccessProfile::constant(sp, 0.3).unwrap(), 0.3).unwrap();
    assert_eq!(r.min_density, 1.0);

    // Mass alpha/2 on most points, 1 on just enough of the rest to reach mean alpha.
    let alpha = 0.5;
    let mut vals = vec![alpha / 2.0; 16];
    for v in vals.iter_mut().take(6) {
        *v = 1.0;
    }
    let prof = SuccessProfile::new(sp, vals).unwrap();
    assert!(prof.mean() >= alpha);
    let r = verify_density(&prof, alpha).unwrap();
    assert!(r.holds && r.min_density == 1.0);

    let err = verify_density(&SuccessProfile::constant(sp, 0.2).unwrap(), 0.25).unwrap_err();
    assert!(matches!(err, crate::error::Error::PremiseViolated { .. }));
}

#[test]
fn spread_profile_gap_is_usually_small() {
    let sp = space(2, 6);
    let prof = spread_profile(sp, &mut ChaCha8Rng::seed_from_u64(3));
    let (alpha, k) = (0.5, 8);
    let mut good = 0;
    for r in 1..=k {
        let tp = ThresholdPair::new(alpha, k, r, BandMode::Claim).unwrap();
        assert!(tp.tau >= alpha / 4.0 && tp.tau <= alpha / 2.0);
        let rep = check_band(&prof, &tp);
        assert!(rep.fourier_gap <= rep.gap + 1e-12);
        good += rep.within as usize;
    }
    assert!(good * 2 > k);
}

#[test]
fn no_mass_in_band_means_no_gap() {
    let sp = space(2, 4);
    let prof = half_space_profile(sp, 0.9, 0.05).unwrap();
    for r in 1..=4 {
        let tp = ThresholdPair::new(0.5, 4, r, BandMode::Claim).unwrap();
        assert_eq!(check_band(&prof, &tp).gap, 0.0);
    }
    let tp = ThresholdPair::new(0.5, 1, 1, BandMode::Claim).unwrap();
    let rep = check_band(&prof, &tp);
    assert!(rep.within && (tp.tau - 0.25).abs() < 1e-15);
    assert!(ThresholdPair::new(0.5, 0, 1, BandMode::Claim).is_err());
}

#[test]
fn random_profile_hits_target_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let prof = random_profile(space(2, 6), 0.25, &mut rng).unwrap();
    assert!((prof.mean() - 0.25).abs() < 1e-9);
}

#[test]
fn coset_rejects_zero_normal() {
    let sp = space(2, 3);
    let zero = FpVector::zero(sp.field(), 3);
    assert!(coset_profile(sp, &zero, 1, 0.9, 0.0).is_err());
}

#[test]
fn instance_round_trip() {
    let sp = space(3, 2);
    let m = random_matrix(sp.field(), 2, &mut ChaCha8Rng::seed_from_u64(5));
    let alg = make_planted_alg(&m, half_space_profile(sp, 0.7, 0.2).unwrap(), Policy::UniformWrong).unwrap();
    let inst = Instance::from_planted(&alg, 42);
    let back = Instance::from_json(&inst.to_json().unwrap()).unwrap();
    assert_eq!(inst, back);
    assert_eq!(back.planted().unwrap().matrix(), &m);
    assert!(inst.to_json().unwrap().contains("\"M\""));
}

proptest! {
    #[test]
    fn fourier_closeness_bounded_by_gap(seed in any::<u64>(), r in 1usize..=8, pick in any::<u64>()) {
        use rand::Rng;
        let sp = space(2, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prof = random_profile(sp, 0.35, &mut rng).unwrap();
        let tp = ThresholdPair::new(0.35, 8, r, BandMode::Algorithm).unwrap();
        let x = prof.threshold_set(tp.tau);
        let xp = prof.threshold_set(tp.tau_prime);
        let mut pick_rng = ChaCha8Rng::seed_from_u64(pick);
        let mut star = x.clone();
        for i in xp.indices() {
            if pick_rng.random::<bool>() {
                star.insert(i);
            }
        }
        let gap = star.density() - x.density();
        let (a, b) = (indicator_spectrum(&x), indicator_spectrum(&star));
        for (u, w) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((u - w).norm() <= gap + 1e-12);
        }
    }

    #[test]
    fn density_claim_holds_for_generated_profiles(seed in any::<u64>(), mean in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let prof = random_profile(space(2, 5), mean, &mut rng).unwrap();
        let alpha = prof.mean();
        prop_assert!(verify_density(&prof, alpha).unwrap().holds);
    }
}
