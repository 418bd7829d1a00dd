//! Greedy maximization under matroid constraints, double greedy, and robust variants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{cap_check, Error, Result};
use crate::lifting::{lift_constraint, lift_family_l, lift_oracle, AgentFamily, BaseFamily, LiftedGroundSet};
use crate::matroids::IndependenceSystem;
use crate::oracles::{MultivariateOracle, SubmodularOracle};
use crate::rational::{to_f64, Rational};
use crate::solution::MultiAgentSolution;
use crate::subset::{all_subsets, SetTuple, Subset};

pub const ROBUST_REMOVAL_CAP: u64 = 1_000_000;
pub const ROBUST_EXHAUSTIVE_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyTrace {
    /// (element, marginal) in pick order.
    pub picks: Vec<(usize, Rational)>,
    pub set: Subset,
    pub value: Rational,
}

/// Adds the feasible element of largest marginal (ties: smallest index) until none
/// is feasible or the best marginal is negative.
pub fn greedy_max(f: &SubmodularOracle, c: &IndependenceSystem) -> Result<GreedyTrace> {
    if f.ground() != c.ground() {
        return Err(Error::DomainMismatch("oracle and constraint on different ground sets".into()));
    }
    let mut set = Subset::EMPTY;
    let mut value = f.value(set);
    let mut picks = Vec::new();
    loop {
        let mut best: Option<(usize, Rational)> = None;
        for v in (0..f.n()).filter(|&v| !set.contains(v)) {
            if !c.independent(set.with(v)) {
                continue;
            }
            let gain = f.value(set.with(v)) - &value;
            if best.as_ref().is_none_or(|(_, b)| &gain > b) {
                best = Some((v, gain));
            }
        }
        match best {
            Some((v, gain)) if gain >= Rational::from_integer(0.into()) => {
                set = set.with(v);
                value += &gain;
                picks.push((v, gain));
            }
            _ => break,
        }
    }
    Ok(GreedyTrace { picks, set, value })
}

/// Deterministic double greedy (value ≥ OPT/3 for nonnegative submodular f).
pub fn double_greedy(f: &SubmodularOracle) -> Subset {
    double_greedy_impl(f, None)
}

/// Randomized double greedy (expected value ≥ OPT/2), reproducible per seed.
pub fn double_greedy_randomized(f: &SubmodularOracle, seed: u64) -> Subset {
    double_greedy_impl(f, Some(ChaCha8Rng::seed_from_u64(seed)))
}

fn double_greedy_impl(f: &SubmodularOracle, mut rng: Option<ChaCha8Rng>) -> Subset {
    let mut x = Subset::EMPTY;
    let mut y = f.ground().full();
    for v in 0..f.n() {
        let a = f.value(x.with(v)) - f.value(x);
        let b = f.value(y.without(v)) - f.value(y);
        let add = match rng.as_mut() {
            None => a >= b,
            Some(r) => {
                let (a, b) = (to_f64(&a).max(0.0), to_f64(&b).max(0.0));
                if a + b == 0.0 {
                    true
                } else {
                    r.gen::<f64>() < a / (a + b)
                }
            }
        };
        if add {
            x = x.with(v);
        } else {
            y = y.without(v);
        }
    }
    x
}

/// Greedy on the lifted (p+1)-matroid intersection, mapped back to a tuple.
pub fn ma_maximize(g: &MultivariateOracle, f: &BaseFamily, fs: &[AgentFamily]) -> Result<MultiAgentSolution> {
    Ok(ma_maximize_traced(g, f, fs)?.0)
}

pub fn ma_maximize_traced(
    g: &MultivariateOracle,
    f: &BaseFamily,
    fs: &[AgentFamily],
) -> Result<(MultiAgentSolution, GreedyTrace, usize)> {
    if fs.len() != g.k() {
        return Err(Error::ArityMismatch { expected: g.k(), got: fs.len() });
    }
    let constraint = lift_constraint(f, fs)?;
    let p = constraint.p();
    let lifted_f = lift_oracle(g)?;
    let trace = greedy_max(&lifted_f, &constraint.into())?;
    let lifted = LiftedGroundSet::new(g.ground().clone(), g.k())?;
    let tuple = lifted.unlift(trace.set);
    check_tuple_feasible(&tuple, f, fs)?;
    Ok((MultiAgentSolution::from_multivariate(tuple, g)?, trace, p))
}

/// Direct re-check on the tuple: disjoint, union ∈ F, S_i ∈ F_i.
pub fn check_tuple_feasible(t: &SetTuple, f: &BaseFamily, fs: &[AgentFamily]) -> Result<()> {
    if !t.is_disjoint() {
        return Err(Error::Infeasible("components overlap".into()));
    }
    if !f.contains(t.union()) {
        return Err(Error::Infeasible("union of the components is not in F".into()));
    }
    if let Some(i) = fs.iter().zip(t.parts()).position(|(fi, &s)| !fi.contains(s)) {
        return Err(Error::Infeasible(format!("component {i} violates its agent constraint")));
    }
    Ok(())
}

fn removal_count(size: usize, tau: usize) -> u64 {
    let mut total = 0u64;
    let mut c = 1u64;
    for j in 0..=tau.min(size) {
        total = total.saturating_add(c);
        c = c.saturating_mul((size - j) as u64) / (j as u64 + 1);
    }
    total
}

/// min over removals A ⊆ S with |A| ≤ τ of f(S − A).
fn robust_value_lifted(f: &SubmodularOracle, s: Subset, tau: usize) -> Rational {
    let elems: Vec<usize> = s.iter().collect();
    let mut best = f.value(s);
    let mut stack: Vec<(usize, Subset, usize)> = vec![(0, s, 0)];
    while let Some((start, cur, removed)) = stack.pop() {
        if removed == tau {
            continue;
        }
        for i in start..elems.len() {
            let next = cur.without(elems[i]);
            let v = f.value(next);
            if v < best {
                best = v;
            }
            stack.push((i + 1, next, removed + 1));
        }
    }
    best
}

/// Exact min of g(S_1 − A_1, …, S_k − A_k) over removals with Σ|A_i| ≤ τ.
pub fn robust_value(g: &MultivariateOracle, t: &SetTuple, tau: usize) -> Result<Rational> {
    let lifted = LiftedGroundSet::new(g.ground().clone(), g.k())?;
    let s = lifted.lift(t)?;
    cap_check("removal sets", removal_count(s.len(), tau), ROBUST_REMOVAL_CAP)?;
    let f = lift_oracle(g)?;
    Ok(robust_value_lifted(&f, s, tau))
}

/// Single-agent robust maximization: max over feasible S of min_{|A| ≤ τ} f(S − A).
pub trait RobustSolver: Send + Sync {
    fn solve(&self, f: &SubmodularOracle, feasible: &dyn Fn(Subset) -> bool, tau: usize) -> Result<Subset>;
}

/// Enumerates every feasible set; ties go to the smallest bitmask.
#[derive(Clone, Copy, Debug)]
pub struct ExhaustiveRobust {
    pub cap: usize,
}

impl Default for ExhaustiveRobust {
    fn default() -> Self {
        ExhaustiveRobust { cap: ROBUST_EXHAUSTIVE_CAP }
    }
}

impl RobustSolver for ExhaustiveRobust {
    fn solve(&self, f: &SubmodularOracle, feasible: &dyn Fn(Subset) -> bool, tau: usize) -> Result<Subset> {
        cap_check("lifted ground set size", f.n() as u64, self.cap as u64)?;
        let mut best: Option<(Subset, Rational)> = None;
        for s in all_subsets(f.n()).filter(|&s| feasible(s)) {
            let v = robust_value_lifted(f, s, tau);
            if best.as_ref().is_none_or(|(_, b)| &v > b) {
                best = Some((s, v));
            }
        }
        best.map(|b| b.0).ok_or_else(|| Error::Infeasible("no feasible set".into()))
    }
}

/// Lifts to max_{S∈L} min_{|A|≤τ} f(S − A) and delegates to `solver`.
/// Returns the tuple and its robust value.
pub fn robust_maximize(
    g: &MultivariateOracle,
    f: &BaseFamily,
    fs: &[AgentFamily],
    tau: usize,
    solver: &dyn RobustSolver,
) -> Result<(MultiAgentSolution, Rational)> {
    if fs.len() != g.k() {
        return Err(Error::ArityMismatch { expected: g.k(), got: fs.len() });
    }
    let l = lift_family_l(f, fs)?;
    let lifted_f = lift_oracle(g)?;
    let s = solver.solve(&lifted_f, &|s| l.contains(s), tau)?;
    let tuple = l.lifted().unlift(s);
    check_tuple_feasible(&tuple, f, fs)?;
    let robust = robust_value_lifted(&lifted_f, s, tau);
    Ok((MultiAgentSolution::from_multivariate(tuple, g)?, robust))
}
