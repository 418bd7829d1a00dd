use num_traits::{Signed, Zero};

use super::{Flags, MultivariateOracle, SubmodularOracle};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matroids::Matroid;
use crate::rational::{int, Rational};
use crate::subset::{GroundSet, Subset};

pub fn make_modular(ground: GroundSet, weights: Vec<Rational>) -> Result<SubmodularOracle> {
    if weights.len() != ground.len() {
        return Err(Error::ArityMismatch { expected: ground.len(), got: weights.len() });
    }
    let nonneg = weights.iter().all(|w| !w.is_negative());
    let flags = Flags { nonnegative: nonneg, monotone: nonneg, normalized: true };
    Ok(SubmodularOracle::new(ground, "modular", flags, move |s| {
        s.iter().fold(Rational::zero(), |acc, v| acc + &weights[v])
    }))
}

/// Weighted coverage: element v covers the universe items in `covers[v]`.
pub fn make_coverage(
    ground: GroundSet,
    covers: Vec<Subset>,
    item_weights: Option<Vec<Rational>>,
) -> Result<SubmodularOracle> {
    if covers.len() != ground.len() {
        return Err(Error::ArityMismatch { expected: ground.len(), got: covers.len() });
    }
    let universe = covers.iter().fold(Subset::EMPTY, |a, &c| a.union(c));
    let weights = match item_weights {
        Some(w) => {
            let needed = universe.iter().last().map_or(0, |m| m + 1);
            if w.len() < needed {
                return Err(Error::InvalidInput(format!("{} item weights for {needed} items", w.len())));
            }
            if w.iter().any(|x| x.is_negative()) {
                return Err(Error::InvalidInput("coverage item weights must be nonnegative".into()));
            }
            w
        }
        None => vec![int(1); 64],
    };
    Ok(SubmodularOracle::new(ground, "coverage", Flags::ALL, move |s| {
        let covered = s.iter().fold(Subset::EMPTY, |a, v| a.union(covers[v]));
        covered.iter().fold(Rational::zero(), |acc, u| acc + &weights[u])
    }))
}

/// f(S) = table[|S|] for a concave table of length n+1.
pub fn make_concave_of_cardinality(ground: GroundSet, table: Vec<Rational>) -> Result<SubmodularOracle> {
    let n = ground.len();
    if table.len() != n + 1 {
        return Err(Error::ArityMismatch { expected: n + 1, got: table.len() });
    }
    for i in 0..n.saturating_sub(1) {
        if &table[i + 1] - &table[i] < &table[i + 2] - &table[i + 1] {
            return Err(Error::InvalidInput(format!("table is not concave at index {}", i + 1)));
        }
    }
    let flags = Flags {
        nonnegative: table.iter().all(|t| !t.is_negative()),
        monotone: table.windows(2).all(|w| w[0] <= w[1]),
        normalized: table[0].is_zero(),
    };
    Ok(SubmodularOracle::new(ground, "concave-of-cardinality", flags, move |s| table[s.len()].clone()))
}

/// f(S) = max weight of an independent subset of S (greedy by weight).
pub fn make_weighted_matroid_rank(matroid: Matroid, weights: Vec<Rational>) -> Result<SubmodularOracle> {
    let ground = matroid.ground().clone();
    if weights.len() != ground.len() {
        return Err(Error::ArityMismatch { expected: ground.len(), got: weights.len() });
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::InvalidInput("matroid rank weights must be nonnegative".into()));
    }
    let mut order: Vec<usize> = (0..ground.len()).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    Ok(SubmodularOracle::new(ground, "weighted-matroid-rank", Flags::ALL, move |s| {
        let mut chosen = Subset::EMPTY;
        let mut total = Rational::zero();
        for &v in order.iter().filter(|&&v| s.contains(v)) {
            if matroid.independent(chosen.with(v)) {
                chosen = chosen.with(v);
                total += &weights[v];
            }
        }
        total
    }))
}

/// Undirected cut function over the vertices of `graph`.
pub fn make_cut_function(graph: &Graph, edge_weights: Option<Vec<Rational>>) -> Result<SubmodularOracle> {
    let weights = edge_weights.unwrap_or_else(|| vec![int(1); graph.edge_count()]);
    if weights.len() != graph.edge_count() {
        return Err(Error::ArityMismatch { expected: graph.edge_count(), got: weights.len() });
    }
    if weights.iter().any(|w| w.is_negative()) {
        return Err(Error::InvalidInput("cut weights must be nonnegative".into()));
    }
    let ground = GroundSet::indexed(graph.vertices);
    let edges = graph.edges.clone();
    let flags = Flags { nonnegative: true, monotone: false, normalized: true };
    Ok(SubmodularOracle::new(ground, "cut", flags, move |s| {
        edges
            .iter()
            .zip(&weights)
            .filter(|(&(a, b), _)| s.contains(a) != s.contains(b))
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }))
}

/// Price of a bundle for one of the two contractors in the three-task allocation example.
fn goel_price(agent: usize, bundle: Subset) -> Rational {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    let discounted_pair = if agent == 0 { Subset::from_iter([A, B]) } else { Subset::from_iter([A, C]) };
    match bundle.len() {
        0 => int(0),
        1 => int(1),
        2 if bundle == discounted_pair => int(1),
        2 => int(2),
        _ => int(2),
    }
}

/// Cheapest way to get tasks {A,B,C} done by two contractors with bundle discounts.
/// The result is monotone but not submodular.
pub fn make_goel_allocation() -> SubmodularOracle {
    let ground = GroundSet::from_labels(&["A", "B", "C"]).expect("static labels");
    let flags = Flags { nonnegative: true, monotone: true, normalized: true };
    SubmodularOracle::new(ground, "goel-allocation", flags, |s| {
        s.subsets().map(|first| goel_price(0, first) + goel_price(1, s.difference(first))).min().expect("nonempty")
    })
}

pub fn make_decomposable(fs: Vec<SubmodularOracle>) -> Result<MultivariateOracle> {
    let first = fs.first().ok_or_else(|| Error::InvalidInput("at least one agent required".into()))?;
    if fs.iter().any(|f| f.ground() != first.ground()) {
        return Err(Error::DomainMismatch("agent oracles on different ground sets".into()));
    }
    let flags = fs.iter().fold(Flags::ALL, |a, f| a.and(f.flags()));
    let ground = first.ground().clone();
    let k = fs.len();
    MultivariateOracle::new(ground, k, "decomposable", flags, move |t| {
        fs.iter().zip(t.parts()).fold(Rational::zero(), |acc, (f, &s)| acc + f.value(s))
    })
}

/// g(S_1..S_k) = zᵀAz with z_i = Σ_{v∈S_i} w(v).
pub fn make_quadratic(
    ground: GroundSet,
    matrix: Vec<Vec<Rational>>,
    weights: Option<Vec<Rational>>,
) -> Result<MultivariateOracle> {
    let k = matrix.len();
    if let Some(row) = matrix.iter().find(|r| r.len() != k) {
        return Err(Error::ArityMismatch { expected: k, got: row.len() });
    }
    let w = weights.unwrap_or_else(|| vec![int(1); ground.len()]);
    if w.len() != ground.len() {
        return Err(Error::ArityMismatch { expected: ground.len(), got: w.len() });
    }
    let all_zero = matrix.iter().flatten().all(|a| a.is_zero());
    let flags = Flags { nonnegative: all_zero, monotone: all_zero, normalized: true };
    MultivariateOracle::new(ground, k, "quadratic", flags, move |t| {
        let z: Vec<Rational> =
            t.parts().iter().map(|s| s.iter().fold(Rational::zero(), |acc, v| acc + &w[v])).collect();
        let mut total = Rational::zero();
        for i in 0..k {
            if z[i].is_zero() {
                continue;
            }
            for j in 0..k {
                if !matrix[i][j].is_zero() && !z[j].is_zero() {
                    total += &matrix[i][j] * &z[i] * &z[j];
                }
            }
        }
        total
    })
}

/// Whether a_ij + a_ji ≤ 0 for every i, j (diagonal included).
pub fn quadratic_condition_holds(matrix: &[Vec<Rational>]) -> bool {
    let k = matrix.len();
    (0..k).all(|i| (0..k).all(|j| !(&matrix[i][j] + &matrix[j][i]).is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::subset::SetTuple;

    fn g3() -> GroundSet {
        GroundSet::indexed(3)
    }

    #[test]
    fn coverage_counts_union() {
        // Elements cover {1,2} and {2,3}.
        let f = make_coverage(
            GroundSet::indexed(2),
            vec![Subset::from_iter([1, 2]), Subset::from_iter([2, 3])],
            None,
        )
        .unwrap();
        assert_eq!(f.evaluate(Subset::full(2)).unwrap(), int(3));
        assert_eq!(f.evaluate(Subset::EMPTY).unwrap(), int(0));
    }

    #[test]
    fn modular_marginal() {
        let f = make_modular(g3(), vec![int(1), int(2), int(3)]).unwrap();
        assert_eq!(f.marginal(Subset::singleton(0), 2).unwrap(), int(3));
        assert!(matches!(f.marginal(Subset::singleton(0), 0), Err(Error::Precondition(_))));
        assert!(matches!(f.evaluate(Subset::singleton(5)), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn goel_values() {
        let c = make_goel_allocation();
        let g = c.ground().clone();
        let at = |ls: &[&str]| c.evaluate(g.subset(ls).unwrap()).unwrap();
        assert_eq!(at(&[]), int(0));
        assert_eq!(at(&["A", "B"]), int(1));
        assert_eq!(at(&["A", "C"]), int(1));
        assert_eq!(at(&["B", "C"]), int(2));
        assert_eq!(at(&["A", "B", "C"]), int(2));
        assert_eq!(c.marginal(g.subset(&["A"]).unwrap(), 1).unwrap(), int(0));
        assert_eq!(c.marginal(g.subset(&["A", "C"]).unwrap(), 1).unwrap(), int(1));
    }

    #[test]
    fn decomposable_sum() {
        let g2 = GroundSet::indexed(2);
        let f1 = make_modular(g2.clone(), vec![int(1), int(0)]).unwrap();
        let f2 = make_modular(g2, vec![int(0), int(1)]).unwrap();
        let g = make_decomposable(vec![f1, f2]).unwrap();
        let t = SetTuple::new(vec![Subset::singleton(0), Subset::singleton(1)]);
        assert_eq!(g.evaluate_tuple(&t).unwrap(), int(2));
        assert_eq!(g.evaluate_tuple(&SetTuple::empty(2)).unwrap(), int(0));
        assert!(matches!(g.evaluate_tuple(&SetTuple::empty(3)), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn quadratic_values() {
        let a = vec![vec![int(0), int(-1)], vec![int(0), int(0)]];
        let g = make_quadratic(g3(), a.clone(), None).unwrap();
        let t = SetTuple::new(vec![Subset::singleton(0), Subset::singleton(1)]);
        assert_eq!(g.evaluate_tuple(&t).unwrap(), int(-1));
        let t = SetTuple::new(vec![Subset::from_iter([0, 1]), Subset::singleton(2)]);
        assert_eq!(g.evaluate_tuple(&t).unwrap(), int(-2));
        assert!(quadratic_condition_holds(&a));
        let zero = make_quadratic(g3(), vec![vec![int(0); 2]; 2], None).unwrap();
        assert_eq!(zero.evaluate_tuple(&t).unwrap(), int(0));
        let weighted = make_quadratic(g3(), a, Some(vec![ratio(1, 2), int(1), int(3)])).unwrap();
        assert_eq!(weighted.evaluate_tuple(&t).unwrap(), ratio(-9, 2));
    }

    #[test]
    fn concave_table_checked() {
        assert!(make_concave_of_cardinality(g3(), vec![int(0), int(2), int(3), int(5)]).is_err());
        let f = make_concave_of_cardinality(g3(), vec![int(0), int(2), int(3), int(3)]).unwrap();
        assert!(f.flags().monotone && f.flags().normalized);
    }

    #[test]
    fn cut_of_triangle() {
        let f = make_cut_function(&Graph::complete(3), None).unwrap();
        assert_eq!(f.value(Subset::singleton(0)), int(2));
        assert_eq!(f.value(Subset::full(3)), int(0));
    }
}
