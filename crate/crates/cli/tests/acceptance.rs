//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Every check compares an algorithm against an independent route (exhaustive search,
//! exact LP, or a direct evaluation), never against itself.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_core::blockers::BlockingFamily;
use submod_core::brute::{brute_max_ma, brute_min_ma, brute_min_mv, brute_min_sa, brute_msca, brute_robust_max};
use submod_core::graph::Graph;
use submod_core::lifting::{lift_family_h, lift_oracle, unlift_oracle, AgentFamily, BaseFamily, LiftedGroundSet};
use submod_core::matroids::{
    make_graphic, make_laminar, make_partition, make_uniform, verify_independence_axioms, verify_matroid_axioms, Matroid,
    MatroidIntersection,
};
use submod_core::maximize::{ma_maximize_traced, robust_maximize, robust_value, ExhaustiveRobust};
use submod_core::minimize::{
    bounded_blocker_round, fracture_expand_return, hall_violation, ma_bounded_blocker_round, msca_bmatching,
    mv_reduce_k_alpha, solve_ma_lp, solve_sa_lp, ExactSaSolver, ThresholdRounder,
};
use submod_core::oracles::{
    make_goel_allocation, make_quadratic, submodularity_violations, validate_monotone, validate_multimonotone,
    validate_multisubmodular, validate_submodular, Flags, MultivariateOracle, SubmodularOracle,
};
use submod_core::random::{random_graph, random_monotone, random_multivariate, random_submodular};
use submod_core::rational::{int, ratio, to_f64};
use submod_core::sfm::{lovasz, sfm_brute, sfm_min_norm, sfm_mv_ring, RingFamily};
use submod_core::subset::all_subsets;
use submod_core::{GroundSet, Rational, Subset};

type Outcome = Result<String, String>;

fn rng(criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + criterion)
}

fn fail<T>(msg: impl Into<String>) -> Result<T, String> {
    Err(msg.into())
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(limit: Duration, start: Instant) -> Result<f64, String> {
    let secs = start.elapsed().as_secs_f64();
    if start.elapsed() > limit {
        return fail(format!("took {secs:.1}s, limit {}s", limit.as_secs()));
    }
    Ok(secs)
}

fn random_matroid(rng: &mut ChaCha8Rng, kind: usize, n: usize) -> Matroid {
    let g = GroundSet::indexed(n);
    match kind {
        0 => make_uniform(g, rng.gen_range(0..=n)).unwrap(),
        1 => {
            let cut = rng.gen_range(0..=n);
            let parts = vec![Subset::from_iter(0..cut), Subset::from_iter(cut..n)];
            make_partition(g, parts, vec![rng.gen_range(0..=2), rng.gen_range(0..=2)]).unwrap()
        }
        2 => {
            let inner = Subset::from_iter(0..rng.gen_range(1..=n));
            let family = vec![Subset::full(n), inner, Subset::singleton(0)];
            let caps = vec![rng.gen_range(1..=n), rng.gen_range(0..=2), rng.gen_range(0..=1)];
            make_laminar(g, family, caps).unwrap()
        }
        _ => {
            // n edges on up to n vertices, loops excluded, parallel edges allowed.
            let vertices = rng.gen_range(2..=n.max(2));
            let edges = (0..n)
                .map(|_| {
                    let a = rng.gen_range(0..vertices);
                    let b = (a + rng.gen_range(1..vertices)) % vertices;
                    (a, b)
                })
                .collect();
            make_graphic(Graph::new(vertices, edges).unwrap()).unwrap().relabel(g).unwrap()
        }
    }
}

fn uniform_partition_or_laminar(rng: &mut ChaCha8Rng, n: usize) -> Matroid {
    let kind = rng.gen_range(0..3);
    random_matroid(rng, kind, n)
}

fn lifted_matroids_are_matroids() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(1);
    let mut checked = 0;
    for kind in 0..4 {
        for n in 1..=5 {
            for k in 1..=2 {
                for _ in 0..2 {
                    let m = random_matroid(&mut rng, kind, n);
                    let h = ok(lift_family_h(&BaseFamily::Matroid(m.clone()), k))?;
                    let lifted = h.matroid().ok_or("lifted family carries no matroid")?;
                    let verdict = ok(verify_matroid_axioms(lifted))?;
                    if !verdict.holds() {
                        return fail(format!("{m:?} with k={k}: {verdict:?}"));
                    }
                    checked += 1;
                }
            }
        }
    }
    // Independent sets ∅, {0}, {1}, {2}, {1,2}: {0} cannot grow from {1,2}.
    let planted = |s: Subset| s.len() <= 1 || s == Subset::from_iter([1, 2]);
    if ok(verify_independence_axioms(3, planted, 16))?.holds() {
        return fail("planted non-matroid accepted");
    }
    let secs = within(Duration::from_secs(10), start)?;
    Ok(format!("{checked} lifted matroids satisfy the axioms, planted non-matroid rejected, {secs:.2}s"))
}

fn random_tuple_fn(rng: &mut ChaCha8Rng, n: usize, k: usize) -> MultivariateOracle {
    match rng.gen_range(0..4) {
        0 => random_multivariate(rng, GroundSet::indexed(n), k),
        1 => {
            let m: Vec<Vec<_>> = (0..k).map(|_| (0..k).map(|_| int(rng.gen_range(-3..=2))).collect()).collect();
            make_quadratic(GroundSet::indexed(n), m, None).unwrap()
        }
        2 => unlift_oracle(&random_submodular(rng, GroundSet::indexed(n * k)), GroundSet::indexed(n), k).unwrap(),
        _ => {
            // Submodular on the lifted space plus noise, so violations of both kinds occur.
            let f = random_monotone(rng, GroundSet::indexed(n * k));
            let table: Vec<Rational> =
                (0..1u64 << (n * k)).map(|s| f.value(Subset(s)) + int(rng.gen_range(-1..=1))).collect();
            MultivariateOracle::new(GroundSet::indexed(n), k, "noisy", Flags::NONE, move |t| {
                let bits = t.parts().iter().enumerate().fold(0u64, |acc, (i, s)| acc | (s.bits() << (i * n)));
                table[bits as usize].clone()
            })
            .unwrap()
        }
    }
}

fn multisubmodular_matches_lifted() -> Outcome {
    let mut rng = rng(2);
    let (mut sub, mut mono) = (0, 0);
    for i in 0..200 {
        let (n, k) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
        let g = random_tuple_fn(&mut rng, n, k);
        let f = ok(lift_oracle(&g))?;
        let a = ok(validate_multisubmodular(&g))?.holds();
        let b = ok(validate_submodular(&f))?.holds();
        if a != b {
            return fail(format!("instance {i}: multisubmodular={a}, lifted submodular={b}"));
        }
        let ma = ok(validate_multimonotone(&g, 16))?.is_none();
        let mb = ok(validate_monotone(&f, 16))?.is_none();
        if ma != mb {
            return fail(format!("instance {i}: multimonotone={ma}, lifted monotone={mb}"));
        }
        sub += a as usize;
        mono += ma as usize;
    }
    Ok(format!("200 agree ({sub} multisubmodular, {mono} monotone)"))
}

fn quadratic_condition_both_ways() -> Outcome {
    let mut rng = rng(3);
    for i in 0..100 {
        let k = rng.gen_range(1..=4);
        let mut m = vec![vec![int(0); k]; k];
        for a in 0..k {
            m[a][a] = int(-rng.gen_range(0..=3));
            for b in a + 1..k {
                let x = rng.gen_range(-4..=4);
                m[a][b] = int(x);
                m[b][a] = int(-x - rng.gen_range(0..=2));
            }
        }
        let n = rng.gen_range(2..=3);
        let g = ok(make_quadratic(GroundSet::indexed(n), m.clone(), None))?;
        if !ok(validate_multisubmodular(&g))?.holds() {
            return fail(format!("nonpositive instance {i} rejected: {m:?}"));
        }
    }
    for i in 0..100 {
        let k = rng.gen_range(1..=4);
        let mut m: Vec<Vec<Rational>> = (0..k).map(|_| (0..k).map(|_| int(rng.gen_range(-4..=4))).collect()).collect();
        let (a, b) = (rng.gen_range(0..k), rng.gen_range(0..k));
        if &m[a][b] + &m[b][a] <= int(0) {
            m[a][b] = -m[b][a].clone() + int(rng.gen_range(1..=3));
            if a == b {
                m[a][a] = int(rng.gen_range(1..=3));
            }
        }
        let n = rng.gen_range(2..=3);
        let g = ok(make_quadratic(GroundSet::indexed(n), m.clone(), None))?;
        if ok(validate_multisubmodular(&g))?.holds() {
            return fail(format!("positive-pair instance {i} accepted: {m:?}"));
        }
    }
    Ok("100 nonpositive matrices validate, 100 with a positive pair give witnesses".into())
}

fn allocation_witness() -> Outcome {
    let f = make_goel_allocation();
    let g = f.ground().clone();
    let (s, t, v) = (ok(g.subset(&["A"]))?, ok(g.subset(&["A", "C"]))?, g.index_of("B").unwrap());
    if ok(validate_submodular(&f))?.holds() {
        return fail("allocation function reported submodular");
    }
    let all = ok(submodularity_violations(&f, 16))?;
    let hit = all
        .iter()
        .find(|w| (w.s, w.t, w.v) == (s, t, v))
        .ok_or_else(|| format!("witness family {all:?} lacks S={{A}}, T={{A,C}}, v=B"))?;
    if (hit.marginal_at_s.clone(), hit.marginal_at_t.clone()) != (int(0), int(1)) {
        return fail(format!("marginals {} and {}, expected 0 and 1", hit.marginal_at_s, hit.marginal_at_t));
    }
    Ok(format!("witness found among {} violations, marginals 0 and 1", all.len()))
}

fn min_norm_matches_brute() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(5);
    for i in 0..500 {
        let n = rng.gen_range(1..=14);
        let f = random_submodular(&mut rng, GroundSet::indexed(n));
        let (s, v) = ok(sfm_min_norm(&f))?;
        let (bs, bv) = ok(sfm_brute(&f))?;
        if s != bs || v != bv || f.value_uncached(s) != bv {
            return fail(format!("instance {i} (n={n}): min-norm {s:?}={v}, brute {bs:?}={bv}"));
        }
    }
    let secs = within(Duration::from_secs(60), start)?;
    Ok(format!("500 instances agree in {secs:.1}s"))
}

fn point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| ratio(rng.gen_range(0..=24), 24)).collect()
}

fn lovasz_value(f: &SubmodularOracle, z: &[Rational]) -> Result<Rational, String> {
    ok(lovasz(f, z)).map(|e| e.value)
}

fn midpoint_holds(f: &SubmodularOracle, a: &[Rational], b: &[Rational]) -> Result<bool, String> {
    let mid: Vec<Rational> = a.iter().zip(b).map(|(x, y)| (x + y) * ratio(1, 2)).collect();
    Ok(lovasz_value(f, &mid)? * int(2) <= lovasz_value(f, a)? + lovasz_value(f, b)?)
}

fn lovasz_properties() -> Outcome {
    let mut rng = rng(6);
    for i in 0..200 {
        let n = rng.gen_range(1..=8);
        let f = random_submodular(&mut rng, GroundSet::indexed(n));
        let z = point(&mut rng, n);
        let c = ratio(rng.gen_range(0..=7), 7);
        let scaled: Vec<Rational> = z.iter().map(|x| x * &c).collect();
        if lovasz_value(&f, &scaled)? != &c * lovasz_value(&f, &z)? {
            return fail(format!("homogeneity fails on instance {i}"));
        }
        let b = point(&mut rng, n);
        if !midpoint_holds(&f, &z, &b)? {
            return fail(format!("midpoint convexity fails on submodular instance {i}"));
        }
    }
    // |S|² is supermodular; some midpoint must fail.
    let n = 4;
    let planted = SubmodularOracle::new(GroundSet::indexed(n), "square", Flags::ALL, |s| int((s.len() * s.len()) as i64));
    let mut caught = false;
    for _ in 0..200 {
        let (a, b) = (point(&mut rng, n), point(&mut rng, n));
        if !midpoint_holds(&planted, &a, &b)? {
            caught = true;
            break;
        }
    }
    if !caught {
        return fail("no midpoint violation found on the supermodular oracle");
    }
    for i in 0..200 {
        let n = rng.gen_range(1..=8);
        let f = random_monotone(&mut rng, GroundSet::indexed(n));
        let lo = point(&mut rng, n);
        let hi: Vec<Rational> =
            lo.iter().map(|x| x + ratio(rng.gen_range(0..=12), 12) * (int(1) - x)).collect();
        if lovasz_value(&f, &lo)? > lovasz_value(&f, &hi)? {
            return fail(format!("monotone extension decreases on pair {i}"));
        }
    }
    Ok("homogeneity and midpoint convexity on 200, planted violation caught, monotone on 200 pairs".into())
}

fn hitting_set(rng: &mut ChaCha8Rng, n: usize, size: usize) -> BlockingFamily {
    let mut sets = Vec::new();
    for _ in 0..rng.gen_range(2..=2 * n) {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        sets.push(Subset::from_iter(idx[..size].iter().copied()));
    }
    BlockingFamily::hitting_set(GroundSet::indexed(n), sets).unwrap()
}

fn single_agent_rounding(
    f: &SubmodularOracle,
    p: &BlockingFamily,
    beta: i64,
    worst: &mut f64,
) -> Result<Option<String>, String> {
    let lp = ok(solve_sa_lp(f, p))?;
    let q = ok(bounded_blocker_round(&lp, p))?;
    let (_, opt) = ok(brute_min_sa(f, p))?;
    let cost = f.value(q);
    if !p.contains(q) {
        return Ok(Some("rounded set infeasible".into()));
    }
    if cost > int(beta) * &lp.objective {
        return Ok(Some(format!("f(Q)={cost} > {beta}·LP={}", int(beta) * &lp.objective)));
    }
    if cost > int(beta) * &opt {
        return Ok(Some(format!("f(Q)={cost} > {beta}·OPT={}", int(beta) * &opt)));
    }
    if opt > int(0) {
        *worst = worst.max(to_f64(&(cost / opt)));
    }
    Ok(None)
}

fn threshold_rounding_bounds() -> Outcome {
    let mut rng = rng(7);
    let (mut worst_vc, mut worst_hs) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let n = rng.gen_range(3..=8);
        let p = BlockingFamily::vertex_cover(&random_graph(&mut rng, n, 0.5)).unwrap();
        let f = random_monotone(&mut rng, GroundSet::indexed(n));
        if let Some(e) = single_agent_rounding(&f, &p, 2, &mut worst_vc)? {
            return fail(format!("vertex cover {i}: {e}"));
        }
    }
    for i in 0..50 {
        let n = rng.gen_range(4..=8);
        let p = hitting_set(&mut rng, n, 3);
        let f = random_monotone(&mut rng, GroundSet::indexed(n));
        if let Some(e) = single_agent_rounding(&f, &p, 3, &mut worst_hs)? {
            return fail(format!("3-uniform hitting set {i}: {e}"));
        }
    }
    Ok(format!("worst ratio {worst_vc:.4} on vertex cover, {worst_hs:.4} on 3-uniform hitting set"))
}

fn multi_agent_rounding_bounds() -> Outcome {
    let mut rng = rng(8);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.gen_range(3..=8);
        let p = BlockingFamily::vertex_cover(&random_graph(&mut rng, n, 0.5)).unwrap();
        let fs: Vec<_> = (0..2).map(|_| random_monotone(&mut rng, GroundSet::indexed(n))).collect();
        let lp = ok(solve_ma_lp(&fs, &p))?;
        let sol = ok(ma_bounded_blocker_round(&lp, &p, &fs))?;
        let bound = 2.0 * (n as f64).ln();
        let direct: Rational = sol.tuple.parts().iter().zip(&fs).map(|(s, f)| f.value(*s)).sum();
        if !sol.is_disjoint() || !p.contains(sol.tuple.union()) || direct != sol.total {
            return fail(format!("instance {i}: infeasible or misreported allocation"));
        }
        let (cost, lpv) = (to_f64(&sol.total), to_f64(&lp.objective));
        if cost > bound * lpv + 1e-9 {
            return fail(format!("instance {i}: cost {cost} > 2 ln n · LP = {}", bound * lpv));
        }
        let (_, opt) = ok(brute_min_ma(&fs, &p))?;
        let r = if opt > int(0) { to_f64(&(sol.total.clone() / opt)) } else { 1.0 };
        if r > bound + 1e-9 {
            return fail(format!("instance {i}: ratio {r} > 2 ln n = {bound}"));
        }
        worst = worst.max(r);
    }
    Ok(format!("100 feasible, worst ratio {worst:.4}"))
}

fn fer_bounds() -> Outcome {
    let mut rng = rng(9);
    let mut worst_product = 0.0f64;
    for i in 0..50 {
        let n = rng.gen_range(3..=8);
        let k = rng.gen_range(1..=3);
        let p = BlockingFamily::vertex_cover(&random_graph(&mut rng, n, 0.5)).unwrap();
        let fs: Vec<_> = (0..k).map(|_| random_monotone(&mut rng, GroundSet::indexed(n))).collect();
        let out = ok(fracture_expand_return(&fs, &p, &ThresholdRounder))?;
        let sol = &out.solution;
        if !sol.is_disjoint() || !p.contains(sol.tuple.union()) {
            return fail(format!("instance {i}: infeasible output"));
        }
        // The LP value is recomputed here rather than read from the trace.
        let lp = to_f64(&ok(solve_ma_lp(&fs, &p))?.objective);
        let product = out.trace.measured_product;
        let cost = to_f64(&sol.total);
        if cost > product * lp * (1.0 + 1e-9) + 1e-9 {
            return fail(format!("instance {i}: cost {cost} > product {product} · LP {lp}"));
        }
        let cap = 2.0 * 2.0 * ((2 * n) as f64).log2().ceil() * (n as f64).ln() * 2.0;
        if product > cap + 1e-9 {
            return fail(format!("instance {i}: product {product} > {cap}"));
        }
        worst_product = worst_product.max(product);
    }
    Ok(format!("50 feasible, largest stage-factor product {worst_product:.4}"))
}

fn k_alpha_bound() -> Outcome {
    let mut rng = rng(10);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let (n, k) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
        let g = random_multivariate(&mut rng, GroundSet::indexed(n), k);
        let p = BlockingFamily::whole(GroundSet::indexed(n));
        let out = ok(mv_reduce_k_alpha(&g, &p, &ExactSaSolver))?;
        let (_, opt) = ok(brute_min_mv(&g, &p))?;
        if out.solution.tuple.union() != Subset::full(n) || g.value(&out.solution.tuple) != out.solution.total {
            return fail(format!("instance {i}: output does not cover V or misreports its cost"));
        }
        if out.solution.total > int(k as i64) * &opt {
            return fail(format!("instance {i}: cost {} > k·OPT = {}", out.solution.total, int(k as i64) * &opt));
        }
        if opt > int(0) {
            worst = worst.max(to_f64(&(out.solution.total.clone() / opt)));
        }
    }
    Ok(format!("50 within k·OPT, worst ratio {worst:.4}"))
}

fn bmatching_bounds() -> Outcome {
    let mut rng = rng(11);
    let mut non_monotone = 0;
    for i in 0..100 {
        let n = rng.gen_range(1..=6);
        let fs: Vec<_> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    random_submodular(&mut rng, GroundSet::indexed(n))
                } else {
                    random_monotone(&mut rng, GroundSet::indexed(n))
                }
            })
            .collect();
        non_monotone += fs.iter().filter(|f| validate_monotone(f, 16).unwrap().is_some()).count();
        // Random regions around a planted perfect matching.
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let regions: Vec<Subset> = (0..n)
            .map(|a| (0..n).filter(|_| rng.gen_bool(0.5)).fold(Subset::singleton(perm[a]), |s, v| s.with(v)))
            .collect();
        let caps = vec![1; n];
        let sol = ok(msca_bmatching(&fs, &regions, &caps))?;
        let (_, opt) = ok(brute_msca(&fs, &regions, Some(&caps)))?;
        if sol.total != opt {
            return fail(format!("b=1 instance {i}: matching {} vs OPT {opt}", sol.total));
        }
    }
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < 100 {
        let n = rng.gen_range(2..=6);
        let k = rng.gen_range(2..=4);
        let regions: Vec<Subset> =
            (0..k).map(|_| (0..n).filter(|_| rng.gen_bool(0.6)).fold(Subset::EMPTY, |s, v| s.with(v))).collect();
        let caps: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
        if hall_violation(&regions, &caps, n).is_some() {
            continue;
        }
        let fs: Vec<_> = (0..k).map(|_| random_monotone(&mut rng, GroundSet::indexed(n))).collect();
        let sol = ok(msca_bmatching(&fs, &regions, &caps))?;
        let (_, opt) = ok(brute_msca(&fs, &regions, Some(&caps)))?;
        let b = *caps.iter().max().unwrap() as i64;
        if sol.total > int(b) * &opt {
            return fail(format!("general-b instance {done}: {} > {b}·OPT = {}", sol.total, int(b) * &opt));
        }
        if opt > int(0) {
            worst = worst.max(to_f64(&(sol.total.clone() / opt)));
        }
        done += 1;
    }
    Ok(format!(
        "b=1 exact on 100 ({non_monotone} non-monotone agents), general b worst ratio {worst:.4} on 100"
    ))
}

fn random_base_family(rng: &mut ChaCha8Rng, n: usize) -> (BaseFamily, bool) {
    match rng.gen_range(0..4) {
        0 => (BaseFamily::Free(GroundSet::indexed(n)), false),
        1 => (BaseFamily::Matroid(uniform_partition_or_laminar(rng, n)), true),
        2 => {
            let ms = (0..2).map(|_| uniform_partition_or_laminar(rng, n)).collect();
            (BaseFamily::Intersection(MatroidIntersection::new(ms).unwrap()), false)
        }
        _ => (BaseFamily::Matroid(random_matroid(rng, 3, n)), true),
    }
}

fn maximization_bounds() -> Outcome {
    let mut rng = rng(12);
    let (mut worst, mut worst_single) = (f64::INFINITY, f64::INFINITY);
    for i in 0..200 {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=10 / k);
        let g = random_multivariate(&mut rng, GroundSet::indexed(n), k);
        let (f, single_matroid) = random_base_family(&mut rng, n);
        let free_agents = rng.gen_bool(0.5);
        let fs: Vec<AgentFamily> = (0..k)
            .map(|_| {
                if free_agents {
                    AgentFamily::free(GroundSet::indexed(n))
                } else {
                    AgentFamily::Matroid(uniform_partition_or_laminar(&mut rng, n))
                }
            })
            .collect();
        let (sol, _, lifted_p) = ok(ma_maximize_traced(&g, &f, &fs))?;
        let (_, opt) = ok(brute_max_ma(&g, &f, &fs))?;
        let r = if opt > int(0) { to_f64(&(sol.total.clone() / &opt)) } else { 1.0 };
        // The lifted intersection has lifted_p = p + 1 matroids.
        let need = if single_matroid && free_agents { 0.5 } else { 1.0 / (lifted_p + 1) as f64 };
        if r < need - 1e-12 {
            return fail(format!("instance {i}: ratio {r} < {need} ({f:?}, free agents {free_agents})"));
        }
        worst = worst.min(r);
        if single_matroid && free_agents {
            worst_single = worst_single.min(r);
        }
    }
    for i in 0..60 {
        let k = rng.gen_range(1..=2);
        let n = rng.gen_range(1..=8 / k);
        let g = random_multivariate(&mut rng, GroundSet::indexed(n), k);
        let (f, _) = random_base_family(&mut rng, n);
        let fs = vec![AgentFamily::free(GroundSet::indexed(n)); k];
        let (sol, _, _) = ok(ma_maximize_traced(&g, &f, &fs))?;
        let vals = (0..=3).map(|t| robust_value(&g, &sol.tuple, t)).collect::<Result<Vec<_>, _>>();
        if !ok(vals)?.windows(2).all(|w| w[0] >= w[1]) {
            return fail(format!("robust instance {i}: value increases with τ"));
        }
        let tau = rng.gen_range(0..=2);
        let (_, got) = ok(robust_maximize(&g, &f, &fs, tau, &ExhaustiveRobust::default()))?;
        let (_, opt) = ok(brute_robust_max(&g, &f, &fs, tau))?;
        if got != opt {
            return fail(format!("robust instance {i}: τ={tau}, exhaustive plug {got} vs brute {opt}"));
        }
    }
    Ok(format!(
        "200 within 1/(p+2), worst {worst:.4}; single matroid with free agents worst {worst_single:.4}; robust exact on 60"
    ))
}

fn ring_minimization() -> Outcome {
    let mut rng = rng(13);
    let mut done = 0;
    while done < 100 {
        let k = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=10 / k);
        let m = n * k;
        let lifted = LiftedGroundSet::new(GroundSet::indexed(n), k).unwrap();
        let f = if rng.gen_bool(0.5) {
            random_submodular(&mut rng, lifted.ground().clone())
        } else {
            random_monotone(&mut rng, lifted.ground().clone())
        };
        let g = ok(unlift_oracle(&f, GroundSet::indexed(n), k))?;
        let implications: Vec<(usize, usize)> =
            (0..rng.gen_range(0..=m)).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect();
        let lower = Subset::from_iter((0..m).filter(|_| rng.gen_bool(0.1)));
        let upper = Subset::from_iter((0..m).filter(|_| rng.gen_bool(0.8))).union(lower);
        let Ok(d) = RingFamily::new(GroundSet::indexed(m), implications.clone(), lower, upper) else {
            continue;
        };
        let (t, v) = ok(sfm_mv_ring(&g, &d))?;
        // Exhaustive scan: every lifted subset that satisfies the implications and bounds directly.
        let mut best: Option<Rational> = None;
        for s in all_subsets(m) {
            let closed = implications.iter().all(|&(a, b)| !s.contains(a) || s.contains(b));
            if closed && lower.is_subset_of(s) && s.is_subset_of(upper) {
                let val = g.value(&lifted.unlift(s));
                if best.as_ref().is_none_or(|b| &val < b) {
                    best = Some(val);
                }
            }
        }
        let best = best.ok_or_else(|| format!("instance {done}: ring accepted but scan found no member"))?;
        let lifted_t = ok(lifted.lift(&t))?;
        let closed = implications.iter().all(|&(a, b)| !lifted_t.contains(a) || lifted_t.contains(b));
        if v != best || g.value(&t) != v || !closed || !lower.is_subset_of(lifted_t) || !lifted_t.is_subset_of(upper) {
            return fail(format!("instance {done}: ring minimizer {v} vs scan {best}"));
        }
        done += 1;
    }
    Ok("100 ring instances match the exhaustive scan".into())
}

fn bench_end_to_end() -> Outcome {
    let start = Instant::now();
    let dir = ok(tempfile::tempdir())?;
    let exe = env!("CARGO_BIN_EXE_submod");
    let corpus = dir.path().join("corpus");
    let gen = ok(Command::new(exe).args(["gen", "--family", "all", "--out"]).arg(&corpus).output())?;
    if !gen.status.success() {
        return fail(format!("gen exited {:?}: {}", gen.status.code(), String::from_utf8_lossy(&gen.stderr)));
    }
    let out = ok(Command::new(exe).args(["bench", "--instance"]).arg(&corpus).output())?;
    if !out.status.success() {
        return fail(format!("bench exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let summary: serde_json::Value = ok(serde_json::from_slice(&out.stdout))?;
    let (runs, violations, errors) = (&summary["runs"], &summary["violations"], &summary["errors"]);
    if violations != 0 || errors != 0 {
        return fail(format!("{violations} violations, {errors} errors"));
    }
    let secs = within(Duration::from_secs(300), start)?;
    Ok(format!("{runs} runs over {} instances, no violations, {secs:.1}s", summary["instances"]))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("lifted matroid axioms", lifted_matroids_are_matroids),
        ("multisubmodular iff lifted submodular", multisubmodular_matches_lifted),
        ("quadratic sign condition", quadratic_condition_both_ways),
        ("allocation non-submodularity witness", allocation_witness),
        ("min-norm SFM equals brute force", min_norm_matches_brute),
        ("Lovász extension properties", lovasz_properties),
        ("single-agent threshold rounding", threshold_rounding_bounds),
        ("multi-agent threshold rounding", multi_agent_rounding_bounds),
        ("fracture, expand, return", fer_bounds),
        ("k·α multivariate reduction", k_alpha_bound),
        ("b-matching allocation", bmatching_bounds),
        ("greedy and robust maximization", maximization_bounds),
        ("ring-constrained minimization", ring_minimization),
        ("bench end to end", bench_end_to_end),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
