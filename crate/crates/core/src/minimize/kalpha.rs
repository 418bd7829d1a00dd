//! The k·α reduction for monotone multivariate minimization.

use crate::blockers::{lift_separation, BlockingFamily};
use crate::brute::brute_min_sa;
use crate::error::{Error, Result};
use crate::lifting::{lift_oracle, LiftedGroundSet};
use crate::oracles::{MultivariateOracle, SubmodularOracle};
use crate::solution::MultiAgentSolution;
use crate::subset::{SetTuple, Subset};

use super::lp::{solve_sa_lp, CoveringLPSolution};
use super::rounding::bounded_blocker_round;

/// An α-approximation for min f(S) over F↑.
pub trait SaSolver: Send + Sync {
    fn name(&self) -> &str;
    fn alpha(&self, p: &BlockingFamily) -> Option<f64>;
    fn solve(&self, f: &SubmodularOracle, p: &BlockingFamily) -> Result<Subset>;
}

/// Exhaustive search over F↑ (α = 1).
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactSaSolver;

impl SaSolver for ExactSaSolver {
    fn name(&self) -> &str {
        "exact"
    }

    fn alpha(&self, _p: &BlockingFamily) -> Option<f64> {
        Some(1.0)
    }

    fn solve(&self, f: &SubmodularOracle, p: &BlockingFamily) -> Result<Subset> {
        Ok(brute_min_sa(f, p)?.0)
    }
}

/// Covering LP plus threshold rounding (α = β).
#[derive(Clone, Copy, Debug, Default)]
pub struct LpRoundingSolver;

impl SaSolver for LpRoundingSolver {
    fn name(&self) -> &str {
        "lp-threshold"
    }

    fn alpha(&self, p: &BlockingFamily) -> Option<f64> {
        p.beta().map(|b| b as f64)
    }

    fn solve(&self, f: &SubmodularOracle, p: &BlockingFamily) -> Result<Subset> {
        let sol = solve_sa_lp(f, p)?;
        bounded_blocker_round(&sol, p)
    }
}

#[derive(Clone, Debug)]
pub struct KAlphaOutcome {
    pub solution: MultiAgentSolution,
    /// The agent e*_v chosen for every element.
    pub assignment: Vec<usize>,
    pub lifted_lp: CoveringLPSolution,
    /// The set returned by the single-agent solver on f′.
    pub reduced_set: Subset,
}

fn split(assignment: &[usize], k: usize, s: Subset) -> SetTuple {
    let mut parts = vec![Subset::EMPTY; k];
    for v in s.iter() {
        parts[assignment[v]] = parts[assignment[v]].with(v);
    }
    SetTuple::new(parts)
}

/// Solves the lifted relaxation on [k]×V, sends each element to the agent carrying
/// the most mass on it (ties: lowest agent), and hands f′(S) = g(split(S)) to `solver`.
pub fn mv_reduce_k_alpha(g: &MultivariateOracle, p: &BlockingFamily, solver: &dyn SaSolver) -> Result<KAlphaOutcome> {
    if g.ground() != p.ground() {
        return Err(Error::DomainMismatch("oracle and blocking family on different ground sets".into()));
    }
    let (n, k) = (g.n(), g.k());
    let lifted = LiftedGroundSet::new(g.ground().clone(), k)?;
    let f = lift_oracle(g)?;
    let lp = solve_sa_lp(&f, &lift_separation(p, k)?)?;
    let w = &lp.z[0];
    let assignment: Vec<usize> = (0..n)
        .map(|v| {
            let mut best = 0;
            for i in 1..k {
                if w[lifted.index(i, v)] > w[lifted.index(best, v)] {
                    best = i;
                }
            }
            best
        })
        .collect();
    let g2 = g.clone();
    let a2 = assignment.clone();
    let reduced = SubmodularOracle::new(g.ground().clone(), format!("{}|assigned", g.name()), g.flags(), move |s| {
        g2.value(&split(&a2, k, s))
    });
    let s = solver.solve(&reduced, p)?;
    if !p.contains(s) {
        return Err(Error::Infeasible("single-agent solver returned a set outside the family".into()));
    }
    let tuple = split(&assignment, k, s);
    let solution = MultiAgentSolution::from_multivariate(tuple, g)?;
    Ok(KAlphaOutcome { solution, assignment, lifted_lp: lp, reduced_set: s })
}

/// k·α for the solver on this family, when α is known.
pub fn k_alpha_bound(k: usize, solver: &dyn SaSolver, p: &BlockingFamily) -> Option<f64> {
    solver.alpha(p).map(|a| k as f64 * a)
}
