use avwc_core::capacity::{
    brute_force_oracle, evaluate_rs_dagger, evaluate_rsk, evaluate_single_letter_degraded, inner_objective,
};
use avwc_core::channel::{random_channel, CavwcSpec};
use avwc_core::{AvwcSpec, Budget, CapacityOptions, Channel, Distribution};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;

fn random_spec(seed: u64, states: usize) -> AvwcSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    AvwcSpec::new(
        (0..states).map(|_| random_channel(2, 2, &mut rng)).collect(),
        (0..states).map(|_| random_channel(2, 2, &mut rng)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_are_nonnegative_and_sound(seed in any::<u64>(), states in 1usize..4) {
        let spec = random_spec(seed, states);
        let est = evaluate_rsk(&spec, 1, &CapacityOptions::default()).unwrap();
        prop_assert!(est.value_bits_per_letter >= 0.0);
        let again = inner_objective(&spec, &est.argmax, &est.worst_q, &Budget::default()).unwrap();
        prop_assert!((again.max(0.0) - est.value_bits_per_letter).abs() <= 1e-9,
            "value {} re-evaluated {}", est.value_bits_per_letter, again);
    }

    #[test]
    fn oracle_never_beats_the_optimiser(seed in any::<u64>(), states in 1usize..3) {
        let spec = random_spec(seed, states);
        let est = evaluate_rsk(&spec, 1, &CapacityOptions::default()).unwrap().value_bits_per_letter;
        let oracle = brute_force_oracle(&spec, 1, 12, None, &Budget::default()).unwrap();
        prop_assert!(oracle <= est + 1e-6, "oracle {oracle} > estimate {est}");
    }
}

#[test]
fn constant_eavesdropper_matches_blahut_arimoto() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for a in 2..=4 {
        for b in 2..=4 {
            let w = random_channel(a, b, &mut rng);
            let spec = AvwcSpec::single(w.clone(), Channel::constant(a, &Distribution::uniform(2))).unwrap();
            let est = evaluate_rsk(&spec, 1, &CapacityOptions::default()).unwrap().value_bits_per_letter;
            let ba = common::blahut_arimoto(&common::rows(&w));
            assert!((est - ba).abs() <= 1e-3, "{a}x{b}: {est} vs {ba}");
            let dagger = evaluate_rs_dagger(&spec.as_cavwc(), &CapacityOptions::default()).unwrap();
            assert!((dagger.value_bits_per_letter - ba).abs() <= 1e-3);
        }
    }
}

#[test]
fn dagger_takes_the_worst_compound_member() {
    // With a useless eavesdropper the value is the compound capacity, which
    // for two BSCs is the capacity of the noisier one.
    let flat = Channel::constant(2, &Distribution::uniform(2));
    let cav = CavwcSpec::new(vec![Channel::bsc(0.05), Channel::bsc(0.2)], vec![flat]).unwrap();
    let est = evaluate_rs_dagger(&cav, &CapacityOptions::default()).unwrap();
    let expect = common::blahut_arimoto(&common::rows(&Channel::bsc(0.2)));
    assert!((est.value_bits_per_letter - expect).abs() <= 1e-3);
    assert_eq!(est.worst_q.probs(), &[0.0, 1.0]);
}

#[test]
fn multi_letter_terms_do_not_decrease() {
    let opts = CapacityOptions::default();
    for seed in 0..5 {
        let spec = random_spec(900 + seed, 2);
        let r1 = evaluate_rsk(&spec, 1, &opts).unwrap().value_bits_per_letter;
        let r2 = evaluate_rsk(&spec, 2, &opts).unwrap().value_bits_per_letter;
        assert!(r2 >= r1 - 2.0 * opts.tol, "seed {seed}: {r2} < {r1}");
    }
}

/// States `s = s1 * 2 + s2`; `W` depends on `s1`, `V` on `s2`, and every `V`
/// is a noisier BSC than every `W`.
fn strongly_degraded(a: [f64; 2], b: [f64; 2]) -> AvwcSpec {
    let legit = (0..4).map(|s| Channel::bsc(a[s / 2])).collect();
    let eaves = (0..4).map(|s| Channel::bsc(b[s % 2])).collect();
    AvwcSpec::new(legit, eaves).unwrap()
}

#[test]
fn degraded_formula_agrees_with_the_general_one() {
    let opts = CapacityOptions::default();
    let grid: Vec<Distribution> = (0..=10).map(|i| Distribution::new(vec![i as f64 / 10.0, 1.0 - i as f64 / 10.0]).unwrap()).collect();
    for (a, b) in [([0.02, 0.1], [0.2, 0.3]), ([0.05, 0.05], [0.15, 0.4]), ([0.0, 0.12], [0.25, 0.25])] {
        let spec = strongly_degraded(a, b);
        let single = evaluate_single_letter_degraded(&spec, 2, 2, &grid, &opts).unwrap().value_bits_per_letter;
        let r1 = evaluate_rsk(&spec, 1, &opts).unwrap().value_bits_per_letter;
        let r2 = evaluate_rsk(&spec, 2, &opts).unwrap().value_bits_per_letter;
        let h = |p: f64| common::entropy(&[p, 1.0 - p]);
        let closed = h(b[0].min(b[1])) - h(a[0].max(a[1]));
        assert!((single - r1).abs() <= 2.0 * opts.tol, "{single} vs {r1}");
        assert!((single - closed).abs() <= 2e-3, "{single} vs closed form {closed}");
        assert!(r2 <= single + 5e-3, "{r2} overshoots {single}");
    }
}
