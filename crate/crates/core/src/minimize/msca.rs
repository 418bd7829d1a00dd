//! Minimum submodular cost allocation with agent regions V_i.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::MinCostFlow;
use crate::oracles::SubmodularOracle;
use crate::rational::{from_f64, harmonic, to_f64, Rational};
use crate::sfm::sfm_min_norm;
use crate::solution::MultiAgentSolution;
use crate::subset::{SetTuple, Subset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MscaRound {
    pub agent: usize,
    pub covered: Subset,
    #[serde(with = "crate::rational::serde_str")]
    pub ratio: Rational,
}

#[derive(Clone, Debug)]
pub struct MscaOutcome {
    pub solution: MultiAgentSolution,
    pub rounds: Vec<MscaRound>,
    /// H(max_i |V_i|), the greedy guarantee against the optimum.
    pub guarantee: f64,
}

fn check_regions(fs: &[SubmodularOracle], regions: &[Subset]) -> Result<usize> {
    let first = fs.first().ok_or_else(|| Error::InvalidInput("at least one agent is required".into()))?;
    if regions.len() != fs.len() {
        return Err(Error::ArityMismatch { expected: fs.len(), got: regions.len() });
    }
    let n = first.n();
    for (f, &r) in fs.iter().zip(regions) {
        if f.ground() != first.ground() {
            return Err(Error::DomainMismatch("agent oracles on different ground sets".into()));
        }
        first.ground().check(r)?;
    }
    let all = regions.iter().fold(Subset::EMPTY, |a, &r| a.union(r));
    if let Some(v) = Subset::full(n).difference(all).min_element() {
        return Err(Error::Infeasible(format!("element {} lies in no agent's region", first.ground().label(v))));
    }
    Ok(n)
}

/// Minimum of f(S)/|S| over nonempty S ⊆ W, exact.
///
/// Bisection on θ with SFM of f − θ|·| narrows the ratio; a final Dinkelbach loop
/// with exact θ certifies that no set does better.
pub fn min_ratio_set(f: &SubmodularOracle, w: Subset) -> Result<(Subset, Rational)> {
    let elems: Vec<usize> = w.iter().collect();
    if elems.is_empty() {
        return Err(Error::Precondition("ratio search over an empty set".into()));
    }
    let m = elems.len();
    let h = f.restrict(w)?;
    let lift = |s: Subset| Subset::from_iter(s.iter().map(|j| elems[j]));
    let ratio_of = |s: Subset| h.value(s) / Rational::from_integer(s.len().into());
    let mut best = (Subset::full(m), ratio_of(Subset::full(m)));
    let (mut lo, mut hi) = (0.0f64, to_f64(&best.1).max(0.0));
    for _ in 0..64 {
        if hi - lo <= 1e-12 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (s, val) = sfm_min_norm(&h.minus_modular(vec![from_f64(mid); m]))?;
        if val.is_negative() && !s.is_empty() {
            let r = ratio_of(s);
            if r < best.1 {
                best = (s, r);
            }
            hi = mid;
        } else {
            lo = mid;
        }
    }
    loop {
        let (s, val) = sfm_min_norm(&h.minus_modular(vec![best.1.clone(); m]))?;
        if !val.is_negative() || s.is_empty() {
            break;
        }
        let r = ratio_of(s);
        if r >= best.1 {
            break;
        }
        best = (s, r);
    }
    Ok((lift(best.0), best.1))
}

/// Greedy cover of V: each round every agent proposes its min-ratio set
/// f_i(S)/|S ∩ U| over S ⊆ V_i ∩ U, and the cheapest proposal (ties: lowest agent) is taken.
pub fn msca_greedy(fs: &[SubmodularOracle], regions: &[Subset]) -> Result<MscaOutcome> {
    let n = check_regions(fs, regions)?;
    let mut uncovered = Subset::full(n);
    let mut parts = vec![Subset::EMPTY; fs.len()];
    let mut rounds = Vec::new();
    while !uncovered.is_empty() {
        let mut best: Option<(usize, Subset, Rational)> = None;
        for (i, (f, &r)) in fs.iter().zip(regions).enumerate() {
            let w = r.intersection(uncovered);
            if w.is_empty() {
                continue;
            }
            let (s, ratio) = min_ratio_set(f, w)?;
            if best.as_ref().is_none_or(|(_, _, b)| &ratio < b) {
                best = Some((i, s, ratio));
            }
        }
        let (agent, s, ratio) = best.expect("regions cover V");
        parts[agent] = parts[agent].union(s);
        uncovered = uncovered.difference(s);
        rounds.push(MscaRound { agent, covered: s, ratio });
    }
    let t = regions.iter().map(|r| r.len()).max().unwrap_or(0);
    let solution = MultiAgentSolution::from_agents(SetTuple::new(parts), fs)?;
    Ok(MscaOutcome { solution, rounds, guarantee: harmonic(t) })
}

/// Minimum-weight saturating b-matching with w(i, v) = f_i({v}) for v ∈ V_i, by
/// min-cost flow. Returns the induced tuple with its true cost Σ f_i(M_i).
pub fn msca_bmatching(fs: &[SubmodularOracle], regions: &[Subset], caps: &[usize]) -> Result<MultiAgentSolution> {
    let n = check_regions(fs, regions)?;
    let k = fs.len();
    if caps.len() != k {
        return Err(Error::ArityMismatch { expected: k, got: caps.len() });
    }
    // Nodes: source, agents 1..=k, elements k+1..=k+n, sink.
    let (s, t) = (0, k + n + 1);
    let mut net = MinCostFlow::new(k + n + 2);
    for (i, &b) in caps.iter().enumerate() {
        net.add_arc(s, 1 + i, b as i64, Rational::zero());
    }
    let mut pair_arcs = Vec::new();
    for (i, (f, &r)) in fs.iter().zip(regions).enumerate() {
        let empty = f.value(Subset::EMPTY);
        for v in r.iter() {
            let w = f.value(Subset::singleton(v)) - &empty;
            let id = net.add_arc(1 + i, 1 + k + v, n as i64, w);
            pair_arcs.push((id, i, v));
        }
    }
    for v in 0..n {
        net.add_arc(1 + k + v, t, 1, Rational::zero());
    }
    let (pushed, _) = net.run(s, t, n as i64);
    if pushed < n as i64 {
        let reach = net.can_reach(t);
        let deficient = Subset::from_iter((0..n).filter(|&v| reach[1 + k + v]));
        let ground = fs[0].ground();
        return Err(Error::Infeasible(format!(
            "no saturating matching: elements {} exceed the capacity of their agents",
            ground.format_subset(deficient)
        )));
    }
    let mut parts = vec![Subset::EMPTY; k];
    for (id, i, v) in pair_arcs {
        if net.flow_on(id) > 0 {
            parts[i] = parts[i].with(v);
        }
    }
    MultiAgentSolution::from_agents(SetTuple::new(parts), fs)
}

/// The deficient set from an infeasibility error, recomputed for callers that want the set.
pub fn hall_violation(regions: &[Subset], caps: &[usize], n: usize) -> Option<Subset> {
    let k = regions.len();
    let (s, t) = (0, k + n + 1);
    let mut net = MinCostFlow::new(k + n + 2);
    for (i, &b) in caps.iter().enumerate() {
        net.add_arc(s, 1 + i, b as i64, Rational::zero());
    }
    for (i, &r) in regions.iter().enumerate() {
        for v in r.iter() {
            net.add_arc(1 + i, 1 + k + v, n as i64, Rational::zero());
        }
    }
    for v in 0..n {
        net.add_arc(1 + k + v, t, 1, Rational::zero());
    }
    let (pushed, _) = net.run(s, t, n as i64);
    (pushed < n as i64).then(|| {
        let reach = net.can_reach(t);
        Subset::from_iter((0..n).filter(|&v| reach[1 + k + v]))
    })
}
