use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_core::blockers::BlockingFamily;
use submod_core::brute::{brute_min_ma, brute_min_mv, brute_min_sa, brute_msca};
use submod_core::minimize::{
    bounded_blocker_round, fracture_expand_return, ma_bounded_blocker_round, msca_bmatching, mv_reduce_k_alpha,
    solve_ma_lp, solve_sa_lp, ExactSaSolver, ThresholdRounder,
};
use submod_core::random::{random_graph, random_monotone, random_multivariate, random_submodular};
use submod_core::rational::{int, to_f64};
use submod_core::{GroundSet, Subset};

fn vertex_cover(rng: &mut ChaCha8Rng, n: usize) -> BlockingFamily {
    BlockingFamily::vertex_cover(&random_graph(rng, n, 0.5)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn threshold_rounding_within_beta(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=7);
        let p = vertex_cover(&mut rng, n);
        let f = random_monotone(&mut rng, GroundSet::indexed(n));
        let sol = solve_sa_lp(&f, &p).unwrap();
        let q = bounded_blocker_round(&sol, &p).unwrap();
        prop_assert!(p.contains(q));
        prop_assert!(f.value(q) <= int(2) * &sol.objective);
        let (_, opt) = brute_min_sa(&f, &p).unwrap();
        prop_assert!(sol.objective <= opt);
    }

    #[test]
    fn ma_rounding_within_beta_log(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=7);
        let p = vertex_cover(&mut rng, n);
        let fs: Vec<_> = (0..2).map(|_| random_monotone(&mut rng, GroundSet::indexed(n))).collect();
        let lp = solve_ma_lp(&fs, &p).unwrap();
        let r = ma_bounded_blocker_round(&lp, &p, &fs).unwrap();
        prop_assert!(r.is_disjoint() && p.contains(r.tuple.union()));
        prop_assert!(to_f64(&r.total) <= 2.0 * (n as f64).ln() * to_f64(&lp.objective) + 1e-9);
        let (_, opt) = brute_min_ma(&fs, &p).unwrap();
        prop_assert!(lp.objective <= opt);
    }

    #[test]
    fn fer_stage_accounting(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=7);
        let k = rng.gen_range(1..=3);
        let p = vertex_cover(&mut rng, n);
        let fs: Vec<_> = (0..k).map(|_| random_monotone(&mut rng, GroundSet::indexed(n))).collect();
        let out = fracture_expand_return(&fs, &p, &ThresholdRounder).unwrap();
        prop_assert!(out.solution.is_disjoint() && p.contains(out.solution.tuple.union()));
        let lp = to_f64(&out.trace.lp_objective);
        prop_assert!(to_f64(&out.solution.total) <= out.trace.measured_product * lp * (1.0 + 1e-9) + 1e-9);
        for s in &out.trace.stages {
            prop_assert!(s.factor <= s.bound + 1e-9, "stage {} factor {} bound {}", s.stage, s.factor, s.bound);
        }
        prop_assert!(out.trace.measured_product <= out.trace.bound_product);
    }

    #[test]
    fn k_alpha_with_exact_solver(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=3);
        let g = random_multivariate(&mut rng, GroundSet::indexed(n), k);
        let p = BlockingFamily::whole(GroundSet::indexed(n));
        let out = mv_reduce_k_alpha(&g, &p, &ExactSaSolver).unwrap();
        let (_, opt) = brute_min_mv(&g, &p).unwrap();
        prop_assert!(out.solution.total <= int(k as i64) * opt);
    }

    #[test]
    fn perfect_bmatching_is_optimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=5);
        let fs: Vec<_> = (0..n).map(|_| random_submodular(&mut rng, GroundSet::indexed(n))).collect();
        let regions = vec![Subset::full(n); n];
        let sol = msca_bmatching(&fs, &regions, &vec![1; n]).unwrap();
        let (_, opt) = brute_msca(&fs, &regions, Some(&vec![1; n])).unwrap();
        prop_assert_eq!(sol.total, opt);
    }
}
