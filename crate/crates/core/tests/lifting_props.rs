use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_core::lifting::{lift_family_h, lift_oracle, BaseFamily};
use submod_core::matroids::{make_partition, make_uniform, verify_matroid_axioms};
use submod_core::oracles::{
    make_quadratic, quadratic_condition_holds, validate_monotone, validate_multimonotone, validate_multisubmodular,
    validate_submodular, MultivariateOracle,
};
use submod_core::random::{random_multivariate, random_submodular};
use submod_core::rational::int;
use submod_core::subset::{GroundSet, Subset};

fn random_tuple_fn(rng: &mut ChaCha8Rng, n: usize, k: usize) -> MultivariateOracle {
    match rng.gen_range(0..3) {
        0 => random_multivariate(rng, GroundSet::indexed(n), k),
        1 => {
            let m: Vec<Vec<_>> = (0..k).map(|_| (0..k).map(|_| int(rng.gen_range(-3..=2))).collect()).collect();
            make_quadratic(GroundSet::indexed(n), m, None).unwrap()
        }
        _ => {
            // Arbitrary set function on the lifted space, read back as a tuple function.
            let f = random_submodular(rng, GroundSet::indexed(n * k));
            let table: Vec<_> = (0..1u64 << (n * k)).map(|s| f.value(Subset(s)) + int(rng.gen_range(-1..=1))).collect();
            MultivariateOracle::new(GroundSet::indexed(n), k, "noisy", Default::default(), move |t| {
                let bits = t.parts().iter().enumerate().fold(0u64, |acc, (i, s)| acc | (s.bits() << (i * n)));
                table[bits as usize].clone()
            })
            .unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn multisubmodular_iff_lifted_submodular(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let k = rng.gen_range(1..=3);
        let g = random_tuple_fn(&mut rng, n, k);
        let f = lift_oracle(&g).unwrap();
        prop_assert_eq!(validate_multisubmodular(&g).unwrap().holds(), validate_submodular(&f).unwrap().holds());
        prop_assert_eq!(validate_multimonotone(&g, 12).unwrap().is_none(), validate_monotone(&f, 16).unwrap().is_none());
    }

    #[test]
    fn quadratic_condition_decides_multisubmodularity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.gen_range(1..=3);
        let m: Vec<Vec<_>> = (0..k).map(|_| (0..k).map(|_| int(rng.gen_range(-3..=3))).collect()).collect();
        let g = make_quadratic(GroundSet::indexed(2), m.clone(), None).unwrap();
        prop_assert_eq!(quadratic_condition_holds(&m), validate_multisubmodular(&g).unwrap().holds());
    }

    #[test]
    fn lifted_matroids_satisfy_axioms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=2);
        let g = GroundSet::indexed(n);
        let m = if rng.gen_bool(0.5) {
            make_uniform(g, rng.gen_range(0..=n)).unwrap()
        } else {
            let cut = rng.gen_range(1..n);
            let parts = vec![Subset::from_iter(0..cut), Subset::from_iter(cut..n)];
            make_partition(g, parts, vec![rng.gen_range(0..=2), rng.gen_range(0..=2)]).unwrap()
        };
        let h = lift_family_h(&BaseFamily::Matroid(m), k).unwrap();
        prop_assert!(verify_matroid_axioms(h.matroid().unwrap()).unwrap().holds());
    }
}
