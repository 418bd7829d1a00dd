use num_traits::{One, Zero};

use crate::blockers::BlockingFamily;
use crate::error::{Error, Result};
use crate::oracles::SubmodularOracle;
use crate::rational::Rational;
use crate::solution::{disjointify, MultiAgentSolution};
use crate::subset::{SetTuple, Subset};

use super::lp::CoveringLPSolution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCandidate {
    pub agent: usize,
    pub set: Subset,
    pub cost: Rational,
}

/// Greedy weighted set cover: repeatedly take the candidate minimizing
/// cost / |set ∩ uncovered| (ties: lowest index). Returns (candidate index, newly covered).
pub fn greedy_set_cover(target: Subset, candidates: &[CoverCandidate]) -> Result<Vec<(usize, Subset)>> {
    let mut uncovered = target;
    let mut picks = Vec::new();
    while !uncovered.is_empty() {
        let mut best: Option<(usize, Rational)> = None;
        for (idx, c) in candidates.iter().enumerate() {
            let gain = c.set.intersection(uncovered).len();
            if gain == 0 {
                continue;
            }
            let r = &c.cost / Rational::from_integer(gain.into());
            if best.as_ref().is_none_or(|(_, b)| &r < b) {
                best = Some((idx, r));
            }
        }
        let Some((idx, _)) = best else {
            return Err(Error::Infeasible(format!("candidates leave {} elements uncovered", uncovered.len())));
        };
        let newly = candidates[idx].set.intersection(uncovered);
        uncovered = uncovered.difference(newly);
        picks.push((idx, newly));
    }
    Ok(picks)
}

fn beta_of(p: &BlockingFamily) -> Result<usize> {
    match p.beta() {
        Some(b) if b > 0 => Ok(b),
        _ => Err(Error::Precondition(format!("family {} has no blocker size bound", p.name()))),
    }
}

/// {v : z(v) ≥ 1/β} for the combined point.
pub fn threshold_set(z: &[Rational], beta: usize) -> Subset {
    let t = Rational::one() / Rational::from_integer(beta.into());
    Subset::from_iter((0..z.len()).filter(|&v| z[v] >= t))
}

/// Q = {v : z(v) ≥ 1/β}. Every blocker member has at most β elements and mass ≥ 1,
/// so one of them reaches 1/β and Q meets it.
pub fn bounded_blocker_round(sol: &CoveringLPSolution, p: &BlockingFamily) -> Result<Subset> {
    let beta = beta_of(p)?;
    let q = threshold_set(&sol.coverage(), beta);
    if !p.contains(q) {
        return Err(Error::Infeasible(format!("threshold set {} misses a blocker member", p.ground().format_subset(q))));
    }
    Ok(q)
}

/// Thresholds the combined point, then covers Q greedily with the support columns (S, i)
/// at cost f_i(S). Each agent receives the union of its picked S ∩ Q; duplicates stay
/// with the lowest agent.
pub fn ma_bounded_blocker_round(
    sol: &CoveringLPSolution,
    p: &BlockingFamily,
    fs: &[SubmodularOracle],
) -> Result<MultiAgentSolution> {
    if fs.len() != sol.k() {
        return Err(Error::ArityMismatch { expected: sol.k(), got: fs.len() });
    }
    let beta = beta_of(p)?;
    let q = threshold_set(&sol.coverage(), beta);
    let candidates: Vec<CoverCandidate> = sol
        .columns
        .iter()
        .filter(|c| !c.weight.is_zero())
        .map(|c| CoverCandidate { agent: c.agent, set: c.set.intersection(q), cost: fs[c.agent].value(c.set) })
        .collect();
    let picks = greedy_set_cover(q, &candidates)?;
    let mut parts = vec![Subset::EMPTY; fs.len()];
    for (idx, _) in picks {
        let c = &candidates[idx];
        parts[c.agent] = parts[c.agent].union(c.set);
    }
    let tuple = disjointify(&SetTuple::new(parts));
    if !p.contains(tuple.union()) {
        return Err(Error::Infeasible("rounded allocation misses a blocker member".into()));
    }
    MultiAgentSolution::from_agents(tuple, fs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::minimize::{solve_ma_lp, solve_sa_lp};
    use crate::oracles::make_modular;
    use crate::rational::{int, ratio};
    use crate::subset::GroundSet;

    fn ones(n: usize) -> SubmodularOracle {
        make_modular(GroundSet::indexed(n), vec![int(1); n]).unwrap()
    }

    #[test]
    fn greedy_cover_ratio_and_ties() {
        let c = |set: &[usize], cost: i64| CoverCandidate { agent: 0, set: Subset::from_iter(set.iter().copied()), cost: int(cost) };
        let cands = vec![c(&[0, 1], 2), c(&[2, 3], 2), c(&[0, 1, 2, 3], 5)];
        let picks = greedy_set_cover(Subset::full(4), &cands).unwrap();
        assert_eq!(picks.iter().map(|p| p.0).collect::<Vec<_>>(), vec![0, 1]);
        assert!(greedy_set_cover(Subset::singleton(5), &cands).is_err());
    }

    #[test]
    fn triangle_threshold_takes_all() {
        let p = BlockingFamily::vertex_cover(&Graph::complete(3)).unwrap();
        let sol = solve_sa_lp(&ones(3), &p).unwrap();
        let q = bounded_blocker_round(&sol, &p).unwrap();
        assert_eq!(q, Subset::full(3));
        assert!(ones(3).value(q) <= int(2) * &sol.objective);
    }

    #[test]
    fn whole_family_threshold() {
        let g = GroundSet::indexed(3);
        let p = BlockingFamily::whole(g.clone());
        let f = make_modular(g, vec![int(1), int(2), int(3)]).unwrap();
        let sol = solve_sa_lp(&f, &p).unwrap();
        assert_eq!(bounded_blocker_round(&sol, &p).unwrap(), Subset::full(3));
    }

    #[test]
    fn two_identical_agents_on_triangle() {
        let p = BlockingFamily::vertex_cover(&Graph::complete(3)).unwrap();
        let fs = [ones(3), ones(3)];
        let sol = solve_ma_lp(&fs, &p).unwrap();
        let r = ma_bounded_blocker_round(&sol, &p, &fs).unwrap();
        assert!(r.is_disjoint() && p.contains(r.tuple.union()));
        assert!(r.total >= int(2));
        assert!(crate::rational::to_f64(&r.total) <= 2.0 * 3f64.ln() * 1.5 + 1e-9);
        assert_eq!(sol.objective, ratio(3, 2));
    }

    #[test]
    fn missing_beta_is_rejected() {
        let p = BlockingFamily::vertex_cover(&Graph::complete(3)).unwrap().with_beta(None);
        let sol = solve_sa_lp(&ones(3), &p).unwrap();
        assert!(matches!(bounded_blocker_round(&sol, &p), Err(Error::Precondition(_))));
    }
}
