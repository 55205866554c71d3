mod common;

use cdelab::measure::{CutPoint, SignedMeasure};
use cdelab::noise::{perturb, witness_measure_family, NoiseOptions};
use cdelab::reduction::{
    closeness_check, cumulative, cut_universe, least_odd_level, reduce_family, threshold, threshold_points,
    MeasureFamily, ReduceOptions,
};
use cdelab::Error;
use common::seeded_dyadic;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn noisy(seed: u64, count: usize, depth: usize, garbage: usize) -> (cdelab::chain::ChainFamily, MeasureFamily<f64>) {
    let family = seeded_dyadic(seed, count, depth);
    let base = witness_measure_family(&family, depth).unwrap();
    let opts = NoiseOptions {
        visible: 0.05,
        garbage,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let (fam, _) = perturb(&base, &family, &mut rng, &opts).unwrap();
    (family, fam)
}

#[test]
fn ladder_levels_rise_with_index() {
    for k in 1..=6 {
        // Away from k = 2 the ladder only rises once δ·3·2^{k−2} < 1.
        let scale = if k == 2 { 1.0 } else { 3.0 * 2f64.powi(k as i32 - 2) };
        for delta in [0.1, 0.5, 0.9].map(|d| d / scale) {
            let levels: Vec<(bool, f64)> = (0..2 * k - 1).map(|i| threshold(k, i, delta)).collect();
            for i in 2..levels.len() {
                assert_eq!(levels[i].0, levels[i - 2].0);
                assert!(levels[i].1 > levels[i - 2].1, "k {k} i {i}");
            }
            assert!(levels.iter().all(|&(_, l)| l > 0.0));
        }
    }
    assert_eq!(threshold(2, 0, 0.5), (true, 0.875));
    assert_eq!(threshold(2, 1, 0.5), (false, 0.75));
    assert_eq!(threshold(2, 2, 0.5), (true, 1.5));
}

#[test]
fn odd_levels() {
    assert_eq!(least_odd_level(0.4), 1);
    assert_eq!(least_odd_level(2.99), 1);
    assert_eq!(least_odd_level(3.0), 2);
    assert_eq!(least_odd_level(4.99), 2);
    assert_eq!(least_odd_level(5.0), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn threshold_points_are_least_and_ordered(seed in any::<u64>(), count in 2usize..12) {
        let (family, fam) = noisy(seed, count, 6, 0);
        for mu in fam.entries().values() {
            if mu.total_variation() <= 2.875 {
                continue;
            }
            let universe = cut_universe(mu, &family);
            let xs = threshold_points(mu, 2, 0.5, &universe).unwrap();
            prop_assert_eq!(xs.len(), 3);
            prop_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
            for (i, x) in xs.iter().enumerate() {
                let (positive, level) = threshold(2, i, 0.5);
                let mass = |c: &CutPoint| {
                    let (p, n) = cumulative(mu, c);
                    if positive { p } else { n }
                };
                prop_assert!(mass(x) >= level);
                // Nothing earlier in the universe (and after the previous point) works.
                let start = if i == 0 { &universe[0] } else { &xs[i - 1] };
                for c in universe.iter().filter(|c| *c >= start && *c < x) {
                    prop_assert!(mass(c) < level);
                }
            }
        }
    }

    #[test]
    fn reduction_meets_norm_contract(seed in any::<u64>(), count in 2usize..16, garbage in 0usize..4) {
        let (family, fam) = noisy(seed, count, 7, garbage);
        prop_assume!(fam.bound() > 3.0 && fam.bound() + 1.5 < 5.0);
        let out = reduce_family(&fam, &family, &ReduceOptions::default()).unwrap();
        prop_assert_eq!(out.k, 2);
        prop_assert!(out.exceptional.len() <= garbage);
        for (node, mu) in out.reduced.entries() {
            let before = fam.get(node).unwrap();
            if out.profile.points.contains_key(node) {
                prop_assert!(mu.total_variation() <= 3.0);
                prop_assert!(mu.atoms().iter().all(|(_, w)| w.abs() == 1.0));
            } else {
                prop_assert_eq!(mu, before);
            }
        }
        prop_assert!(out.output_bound <= 3.0);
    }

    #[test]
    fn reduction_is_idempotent(seed in any::<u64>(), count in 2usize..12) {
        let (family, fam) = noisy(seed, count, 6, 1);
        prop_assume!(fam.bound() > 3.0 && fam.bound() + 1.5 < 5.0);
        let once = reduce_family(&fam, &family, &ReduceOptions::default()).unwrap();
        prop_assume!(once.output_bound >= 3.0);
        let twice = reduce_family(&once.reduced, &family, &ReduceOptions::default()).unwrap();
        prop_assert_eq!(twice.reduced.entries(), once.reduced.entries());
    }

    #[test]
    fn reduced_family_stays_close(seed in any::<u64>(), count in 2usize..16) {
        let (family, fam) = noisy(seed, count, 7, 2);
        prop_assume!(fam.bound() + 1.5 < 5.0);
        let out = reduce_family(&fam, &family, &ReduceOptions::default()).unwrap();
        let h = out.exceptional_horizon();
        prop_assert!(closeness_check(&fam, &family, h, 0.1).unwrap().passed());
        prop_assert!(closeness_check(&out.reduced, &family, h, 0.2).unwrap().passed());
    }
}

#[test]
fn exceptional_cap_is_enforced() {
    let (family, fam) = noisy(3, 8, 6, 4);
    let err = reduce_family(&fam, &family, &ReduceOptions { delta: 0.5, max_exceptional: 1 }).unwrap_err();
    assert!(matches!(err, Error::ExceptionalCapExceeded { .. }));
}

#[test]
fn precondition_on_norm_and_delta() {
    let (family, fam) = noisy(3, 8, 6, 0);
    assert!(reduce_family(&fam, &family, &ReduceOptions { delta: 0.9, max_exceptional: 16 }).is_err());
    assert!(reduce_family(&fam, &family, &ReduceOptions { delta: 0.0, max_exceptional: 16 }).is_err());
}

#[test]
fn family_json_roundtrip_is_exact() {
    let (_, fam) = noisy(5, 6, 5, 1);
    let back = MeasureFamily::<f64>::from_json(&fam.to_json().unwrap()).unwrap();
    assert_eq!(back.entries(), fam.entries());
    let empty: SignedMeasure<f64> = SignedMeasure::zero();
    assert!(empty.is_zero());
}
