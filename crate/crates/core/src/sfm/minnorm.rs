//! Wolfe's minimum-norm-point algorithm over the base polytope B(f).
//!
//! The iteration runs in f64. The minimizer is then read off the final point as the
//! best prefix {v : x_v ≤ θ} of the sorted coordinates, with every candidate
//! re-evaluated exactly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::oracles::SubmodularOracle;
use crate::rational::{to_f64, Rational};
use crate::subset::Subset;

#[derive(Clone, Copy, Debug)]
pub struct MinNormConfig {
    pub tolerance: f64,
    pub max_major: usize,
}

impl MinNormConfig {
    pub fn for_size(n: usize) -> Self {
        MinNormConfig { tolerance: 1e-9, max_major: 1000 + 50 * n * n }
    }
}

pub fn sfm_min_norm(f: &SubmodularOracle) -> Result<(Subset, Rational)> {
    sfm_min_norm_with(f, MinNormConfig::for_size(f.n()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Greedy vertex minimizing ⟨w, q⟩ over B(f): ascending order of w, ties by index.
fn linear_oracle(f: &SubmodularOracle, base: &Rational, w: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    let mut q = vec![0.0; n];
    let mut prefix = Subset::EMPTY;
    let mut prev = base.clone();
    for v in order {
        prefix = prefix.with(v);
        let cur = f.value(prefix);
        q[v] = to_f64(&(&cur - &prev));
        prev = cur;
    }
    q
}

/// Weights α with Σα = 1 minimizing ‖Σ α_i p_i‖.
fn affine_minimizer(points: &[Vec<f64>]) -> Vec<f64> {
    let m = points.len();
    let mut a = DMatrix::<f64>::zeros(m + 1, m + 1);
    for i in 0..m {
        for j in 0..m {
            a[(i, j)] = dot(&points[i], &points[j]);
        }
        a[(i, m)] = 1.0;
        a[(m, i)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(m + 1);
    b[m] = 1.0;
    let sol = a.clone().lu().solve(&b).filter(|s| s.iter().all(|x| x.is_finite())).unwrap_or_else(|| {
        a.svd(true, true).solve(&b, 1e-12).unwrap_or_else(|_| {
            let mut e = DVector::zeros(m + 1);
            e[0] = 1.0;
            e
        })
    });
    sol.iter().take(m).copied().collect()
}

fn combine(points: &[Vec<f64>], lambda: &[f64], n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (p, &l) in points.iter().zip(lambda) {
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi += l * pi;
        }
    }
    x
}

pub fn sfm_min_norm_with(f: &SubmodularOracle, cfg: MinNormConfig) -> Result<(Subset, Rational)> {
    let n = f.n();
    // Work with f − f(∅) so the base polytope is well defined.
    let base = f.value(Subset::EMPTY);
    let mut points = vec![linear_oracle(f, &base, &vec![0.0; n])];
    let mut lambda = vec![1.0];
    let mut x = points[0].clone();
    let scale = points[0].iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let eps = cfg.tolerance * scale * scale;
    let mut converged = false;

    for _major in 0..cfg.max_major {
        let q = linear_oracle(f, &base, &x);
        let gap = dot(&x, &x) - dot(&x, &q);
        if gap <= eps {
            converged = true;
            break;
        }
        if points.iter().any(|p| p.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-12 * scale)) {
            converged = true;
            break;
        }
        points.push(q);
        lambda.push(0.0);
        loop {
            let alpha = affine_minimizer(&points);
            if alpha.iter().all(|&a| a > 1e-12) {
                lambda = alpha;
                x = combine(&points, &lambda, n);
                break;
            }
            // Step from λ toward α until the first coordinate hits zero.
            let mut theta = 1.0f64;
            for (l, a) in lambda.iter().zip(&alpha) {
                if *a <= 1e-12 && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            for (l, a) in lambda.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            let mut keep_pts = Vec::new();
            let mut keep_l = Vec::new();
            for (p, &l) in points.iter().zip(&lambda) {
                if l > 1e-12 {
                    keep_pts.push(p.clone());
                    keep_l.push(l);
                }
            }
            if keep_pts.is_empty() {
                // Numerical breakdown; restart from the newest vertex.
                keep_pts.push(points.last().expect("nonempty").clone());
                keep_l.push(1.0);
            }
            let total: f64 = keep_l.iter().sum();
            lambda = keep_l.iter().map(|l| l / total).collect();
            points = keep_pts;
            x = combine(&points, &lambda, n);
            if points.len() == 1 {
                break;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut best = (Subset::EMPTY, f.value(Subset::EMPTY));
    let mut prefix = Subset::EMPTY;
    for &v in &order {
        prefix = prefix.with(v);
        let val = f.value(prefix);
        if val < best.1 || (val == best.1 && prefix < best.0) {
            best = (prefix, val);
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: cfg.max_major,
            best_bound: format!("{} at {:?}", crate::rational::format(&best.1), best.0),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::oracles::{make_concave_of_cardinality, make_cut_function, make_modular};
    use crate::rational::int;
    use crate::sfm::sfm_brute;
    use crate::subset::GroundSet;

    #[test]
    fn modular_cases() {
        let g = GroundSet::indexed(4);
        let pos = make_modular(g.clone(), vec![int(1), int(2), int(0), int(3)]).unwrap();
        assert_eq!(sfm_min_norm(&pos).unwrap(), (Subset::EMPTY, int(0)));
        let one_neg = make_modular(g, vec![int(1), int(-2), int(1), int(3)]).unwrap();
        assert_eq!(sfm_min_norm(&one_neg).unwrap(), (Subset::singleton(1), int(-2)));
    }

    #[test]
    fn matches_brute_on_cut_plus_modular() {
        let cut = make_cut_function(&Graph::complete(5), None).unwrap();
        let f = cut.minus_modular(vec![int(3), int(1), int(5), int(0), int(2)]);
        assert_eq!(sfm_min_norm(&f).unwrap(), sfm_brute(&f).unwrap());
        let conc = make_concave_of_cardinality(GroundSet::indexed(4), vec![int(0), int(4), int(7), int(9), int(10)])
            .unwrap()
            .minus_modular(vec![int(3); 4]);
        assert_eq!(sfm_min_norm(&conc).unwrap(), sfm_brute(&conc).unwrap());
    }
}
