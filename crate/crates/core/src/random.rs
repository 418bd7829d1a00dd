//! Seeded random instances for tests, benchmarks and corpus generation.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::Graph;
use crate::lifting::unlift_oracle;
use crate::oracles::{make_concave_of_cardinality, make_coverage, make_modular, MultivariateOracle, SubmodularOracle};
use crate::rational::{int, Rational};
use crate::subset::{GroundSet, Subset};

/// G(n, p) conditioned on having at least one edge.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> Graph {
    assert!(n >= 2, "a graph with an edge needs two vertices");
    loop {
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(p)).collect();
        if !edges.is_empty() {
            return Graph::new(n, edges).expect("edges are in range");
        }
    }
}

/// Weighted coverage over `items` universe items; each element covers 1..=3 of them.
pub fn random_coverage<R: Rng>(rng: &mut R, ground: GroundSet, items: usize) -> SubmodularOracle {
    let items = items.clamp(1, 64);
    let covers = (0..ground.len())
        .map(|_| {
            let m = rng.gen_range(1..=3.min(items));
            Subset::from_iter((0..m).map(|_| rng.gen_range(0..items)))
        })
        .collect();
    let weights = (0..items).map(|_| int(rng.gen_range(1..=6))).collect();
    make_coverage(ground, covers, Some(weights)).expect("covers match the ground set")
}

/// A random concave table a_0 = 0 ≤ a_1 ≤ … with nonincreasing increments.
pub fn random_concave_table<R: Rng>(rng: &mut R, n: usize) -> Vec<Rational> {
    let mut incs: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=5)).collect();
    incs.sort_unstable_by(|a, b| b.cmp(a));
    let mut table = vec![int(0)];
    let mut acc = 0;
    for d in incs {
        acc += d;
        table.push(int(acc));
    }
    table
}

/// Nonnegative, monotone, normalized submodular: coverage + concave-of-cardinality + modular.
pub fn random_monotone<R: Rng>(rng: &mut R, ground: GroundSet) -> SubmodularOracle {
    let n = ground.len();
    let cov = random_coverage(rng, ground.clone(), n + 2);
    let conc = make_concave_of_cardinality(ground.clone(), random_concave_table(rng, n)).expect("table is concave");
    let modular = make_modular(ground, (0..n).map(|_| int(rng.gen_range(0..=3))).collect()).expect("arity");
    SubmodularOracle::sum(&[cov, conc, modular]).expect("same ground")
}

/// Random modular function with weights in 1..=max.
pub fn random_modular<R: Rng>(rng: &mut R, ground: GroundSet, max: i64) -> SubmodularOracle {
    let n = ground.len();
    make_modular(ground, (0..n).map(|_| int(rng.gen_range(1..=max))).collect()).expect("arity")
}

/// Submodular but generally neither monotone nor nonnegative: monotone part minus a modular part.
pub fn random_submodular<R: Rng>(rng: &mut R, ground: GroundSet) -> SubmodularOracle {
    let n = ground.len();
    let base = random_monotone(rng, ground);
    base.minus_modular((0..n).map(|_| int(rng.gen_range(0..=8))).collect())
}

/// Monotone multi-submodular function obtained by reading a random monotone
/// submodular function on [k]×V as a tuple function.
pub fn random_multivariate<R: Rng>(rng: &mut R, ground: GroundSet, k: usize) -> MultivariateOracle {
    let lifted_labels: Vec<String> =
        (0..k).flat_map(|i| ground.labels().iter().map(move |l| format!("{i}:{l}"))).collect();
    let lifted = GroundSet::new(lifted_labels).expect("distinct labels");
    let f = random_monotone(rng, lifted);
    unlift_oracle(&f, ground, k).expect("sizes match")
}

/// A uniformly random permutation of 0..n.
pub fn random_order<R: Rng>(rng: &mut R, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}
