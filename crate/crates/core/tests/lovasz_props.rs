use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_core::random::{random_monotone, random_submodular};
use submod_core::rational::{ratio, Rational};
use submod_core::sfm::{level_set_decomposition, lovasz, sfm_brute, sfm_min_norm};
use submod_core::subset::{GroundSet, Subset};

fn point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| ratio(rng.gen_range(0..=12), 12)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn extension_is_convex_and_homogeneous(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let f = random_submodular(&mut rng, GroundSet::indexed(n));
        let (a, b) = (point(&mut rng, n), point(&mut rng, n));
        let lam = ratio(rng.gen_range(0..=5), 5);
        let mid: Vec<Rational> = a.iter().zip(&b).map(|(x, y)| &lam * x + (Rational::from_integer(1.into()) - &lam) * y).collect();
        let lhs = lovasz(&f, &mid).unwrap().value;
        let rhs = &lam * lovasz(&f, &a).unwrap().value + (Rational::from_integer(1.into()) - &lam) * lovasz(&f, &b).unwrap().value;
        prop_assert!(lhs <= rhs);
        let half: Vec<Rational> = a.iter().map(|x| x * ratio(1, 2)).collect();
        if f.value(Subset::EMPTY) == Rational::from_integer(0.into()) {
            prop_assert_eq!(lovasz(&f, &half).unwrap().value, lovasz(&f, &a).unwrap().value * ratio(1, 2));
        }
    }

    #[test]
    fn decomposition_reproduces_point_and_value(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let f = random_monotone(&mut rng, GroundSet::indexed(n));
        let z = point(&mut rng, n);
        let cols = level_set_decomposition(&f, &z).unwrap();
        for v in 0..n {
            let mass = cols.iter().filter(|(s, _)| s.contains(v)).fold(Rational::from_integer(0.into()), |a, (_, w)| a + w);
            prop_assert_eq!(&mass, &z[v]);
        }
        let cost = cols.iter().fold(Rational::from_integer(0.into()), |a, (s, w)| a + w * f.value(*s));
        prop_assert_eq!(cost, lovasz(&f, &z).unwrap().value);
    }

    #[test]
    fn monotone_extension_is_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let f = random_monotone(&mut rng, GroundSet::indexed(n));
        let lo = point(&mut rng, n);
        let hi: Vec<Rational> = lo.iter().map(|x| x + ratio(rng.gen_range(0..=12), 12) * (Rational::from_integer(1.into()) - x)).collect();
        prop_assert!(lovasz(&f, &lo).unwrap().value <= lovasz(&f, &hi).unwrap().value);
    }

    #[test]
    fn min_norm_matches_brute(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=10);
        let f = random_submodular(&mut rng, GroundSet::indexed(n));
        prop_assert_eq!(sfm_min_norm(&f).unwrap(), sfm_brute(&f).unwrap());
    }
}
