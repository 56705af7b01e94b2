use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weighted_entropy::{
    cover_entropy, disjointify, finer_than, hlp_compare, is_mu_partition, mix, mix_division,
    partition_entropy, partition_to_division, random, random_division, restrict, weighted_entropy,
    AtomSet, Curvature, EntropyFunctional, Measure, MixtureSpec, SetFamily,
};

const TOL: f64 = 1e-9;

fn functional(index: usize) -> EntropyFunctional {
    [
        "shannon",
        "renyi:0.5",
        "renyi:2",
        "tsallis:0.5",
        "tsallis:2",
    ][index % 5]
        .parse()
        .unwrap()
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0f64..1.0, 1..9).prop_filter_map("all zero", |w| {
        let total: f64 = w.iter().sum();
        (total > 1e-3).then(|| w.iter().map(|v| v / total).collect())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn restriction_is_idempotent_and_splits_mass(mass in weights(), bits in any::<u16>()) {
        let mu = Measure::probability(mass).unwrap();
        let n = mu.space().len();
        let set = AtomSet::new(mu.space(), (0..n).filter(|x| bits >> x & 1 == 1)).unwrap();
        let once = restrict(&mu, &set).unwrap();
        prop_assert_eq!(&restrict(&once, &set).unwrap(), &once);
        let rest = restrict(&mu, &set.complement()).unwrap();
        prop_assert!((once.total() + rest.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_ignores_block_order(mass in weights(), f in 0usize..5, shift in 0usize..8) {
        let e = functional(f);
        let mut rotated = mass.clone();
        let len = rotated.len();
        rotated.rotate_left(shift % len);
        let a = e.evaluate(&mass).unwrap();
        let b = e.evaluate(&rotated).unwrap();
        prop_assert!((a - b).abs() <= TOL);
    }

    #[test]
    fn merging_blocks_does_not_raise_entropy(seed in any::<u64>(), f in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(2..=8);
        let mu = random::measure(&mut rng, n, 0.2);
        let p = random::partition(&mut rng, n);
        prop_assume!(p.len() >= 2);
        let mut lists = p.to_index_lists();
        let last = lists.pop().unwrap();
        lists[0].extend(last);
        let merged = SetFamily::from_indices(mu.space(), &lists).unwrap();
        let e = functional(f);
        let before = partition_entropy(&e, &mu, &p).unwrap();
        let after = partition_entropy(&e, &mu, &merged).unwrap();
        prop_assert!(after <= before + TOL);
    }

    #[test]
    fn round_trip_through_a_division_does_not_raise_entropy(seed in any::<u64>(), f in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=8);
        let mu = random::measure(&mut rng, n, 0.2);
        let p = random::partition(&mut rng, n);
        let q = random::coarsening(&mut rng, &p);
        let e = functional(f);
        let d = partition_to_division(&mu, &p, &q).unwrap();
        let back = disjointify(&d).unwrap();
        prop_assert!(is_mu_partition(&back, &mu) && finer_than(&back, &q));
        let h = partition_entropy(&e, &mu, &p).unwrap();
        prop_assert!(partition_entropy(&e, &mu, &back).unwrap() <= h + TOL);
    }

    #[test]
    fn adding_a_cover_set_does_not_raise_cover_entropy(seed in any::<u64>(), f in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=7);
        let inst = random::instance(&mut rng, n, 3, 0.2);
        let mut lists = inst.cover.to_index_lists();
        lists.push((0..n).filter(|_| rng.random_bool(0.5)).collect());
        let larger = SetFamily::from_indices(inst.measure.space(), &lists).unwrap();
        let e = functional(f);
        let small = cover_entropy(&e, &inst.measure, &inst.cover, 1_000_000).unwrap().value;
        let big = cover_entropy(&e, &inst.measure, &larger, 1_000_000).unwrap().value;
        prop_assert!(big.le_within(&small, TOL));
    }

    #[test]
    fn refinements_never_beat_the_cover_entropy(seed in any::<u64>(), f in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=7);
        let mu = random::measure(&mut rng, n, 0.2);
        let p = random::partition(&mut rng, n);
        let q = random::coarsening(&mut rng, &p);
        let r = random::refinement(&mut rng, &p);
        let e = functional(f);
        let h = cover_entropy(&e, &mu, &q, 1_000_000).unwrap().value.finite().unwrap();
        prop_assert!(h <= partition_entropy(&e, &mu, &r).unwrap() + TOL);
    }

    #[test]
    fn hlp_holds_for_generated_inputs(seed in any::<u64>(), len in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = random::hlp_input(&mut rng, len);
        let mut x_prefix = 0.0;
        let mut y_prefix = 0.0;
        for (a, b) in input.x().iter().zip(input.y()) {
            x_prefix += a;
            y_prefix += b;
            prop_assert!(x_prefix <= y_prefix + TOL);
        }
        prop_assert!(hlp_compare(&input, f64::sqrt, Curvature::Concave).unwrap().holds);
        prop_assert!(hlp_compare(&input, |t| t * t * t, Curvature::Convex).unwrap().holds);
    }

    #[test]
    fn tsallis_near_one_is_shannon_in_nats(mass in weights()) {
        let shannon = EntropyFunctional::shannon().evaluate(&mass).unwrap();
        for alpha in [1.0 - 1e-6, 1.0 + 1e-6] {
            let t = EntropyFunctional::tsallis(alpha).unwrap().evaluate(&mass).unwrap();
            prop_assert!((t - std::f64::consts::LN_2 * shannon).abs() < 1e-4);
        }
    }

    #[test]
    fn tsallis_partition_entropy_is_superadditive_over_mixtures(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=7);
        let a = rng.random_range(0.05..0.95);
        let spec = MixtureSpec::new(vec![
            (a, random::measure(&mut rng, n, 0.2)),
            (1.0 - a, random::measure(&mut rng, n, 0.2)),
        ])
        .unwrap();
        let p = random::partition(&mut rng, n);
        for alpha in [0.5, 2.0, 3.0] {
            let e = EntropyFunctional::tsallis(alpha).unwrap();
            let mixed = partition_entropy(&e, &mix(&spec).unwrap(), &p).unwrap();
            let parts: f64 = spec
                .components()
                .iter()
                .map(|(c, mu)| c * partition_entropy(&e, mu, &p).unwrap())
                .sum();
            prop_assert!(mixed >= parts - TOL);
        }
    }

    #[test]
    fn mixed_divisions_respect_the_upper_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=7);
        let q = random::cover(&mut rng, n, 3, true);
        let a = rng.random_range(0.05..0.95);
        let spec = MixtureSpec::new(vec![
            (a, random::measure(&mut rng, n, 0.2)),
            (1.0 - a, random::measure(&mut rng, n, 0.2)),
        ])
        .unwrap();
        let divisions: Vec<_> = spec
            .components()
            .iter()
            .map(|(_, mu)| random_division(mu, &q, rng.random()).unwrap())
            .collect();
        let mixed = mix_division(&spec, &divisions).unwrap();
        for alpha in [0.5, 2.0, 3.0] {
            let e = EntropyFunctional::tsallis(alpha).unwrap();
            let powers: f64 = spec.coefficients().iter().map(|c| c.powf(alpha)).sum();
            let bound: f64 = spec
                .coefficients()
                .iter()
                .zip(&divisions)
                .map(|(c, d)| c.powf(alpha) * weighted_entropy(&e, d))
                .sum::<f64>()
                + (powers - 1.0) / (1.0 - alpha);
            prop_assert!(weighted_entropy(&e, &mixed) <= bound + TOL);
        }
    }
}
