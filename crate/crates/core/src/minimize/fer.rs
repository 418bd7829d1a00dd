//! Fracture / expand / return: turns a multi-agent LP solution into a laminar
//! single-agent instance and rounds that.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::blockers::BlockingFamily;
use crate::error::{Error, Result};
use crate::oracles::{Flags, SubmodularOracle};
use crate::rational::{to_f64, Rational};
use crate::sfm::lovasz;
use crate::solution::{disjointify, MultiAgentSolution};
use crate::subset::{SetTuple, Subset};

use super::lp::{solve_ma_lp, Column, CoveringLPSolution};
use super::rounding::{greedy_set_cover, threshold_set, CoverCandidate};

/// A single-agent rounding for min g(S) over F↑ from a fractional point ẑ ∈ P*(F).
pub trait SaRounder: Send + Sync {
    fn name(&self) -> &str;
    /// The guarantee g(Q) ≤ α·g^L(ẑ), if the rounder has one for this family.
    fn alpha(&self, p: &BlockingFamily) -> Option<f64>;
    fn round(&self, g: &SubmodularOracle, p: &BlockingFamily, zhat: &[Rational]) -> Result<Subset>;
}

/// Q = {v : ẑ(v) ≥ 1/β}; α = β.
#[derive(Clone, Copy, Debug, Default)]
pub struct ThresholdRounder;

impl SaRounder for ThresholdRounder {
    fn name(&self) -> &str {
        "threshold"
    }

    fn alpha(&self, p: &BlockingFamily) -> Option<f64> {
        p.beta().map(|b| b as f64)
    }

    fn round(&self, _g: &SubmodularOracle, p: &BlockingFamily, zhat: &[Rational]) -> Result<Subset> {
        let beta = p
            .beta()
            .filter(|&b| b > 0)
            .ok_or_else(|| Error::Precondition(format!("family {} has no blocker size bound", p.name())))?;
        Ok(threshold_set(zhat, beta))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    /// Σ x(U, i)·f_i(U) after the stage (the final integral cost for the last stage).
    #[serde(with = "crate::rational::serde_str")]
    pub cost: Rational,
    /// cost / previous cost, 1 when both are zero.
    pub factor: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FerTrace {
    #[serde(with = "crate::rational::serde_str")]
    pub lp_objective: Rational,
    pub stages: Vec<StageRecord>,
    /// Indices j of the nonempty bins Z_j.
    pub bins: Vec<usize>,
    /// Largest greedy-cover ratio over the bins, against the expanded fractional cover.
    pub greedy_ratio: f64,
    pub measured_product: f64,
    pub bound_product: f64,
}

#[derive(Clone, Debug)]
pub struct FerOutcome {
    pub solution: MultiAgentSolution,
    pub trace: FerTrace,
    pub lp: CoveringLPSolution,
}

pub fn fracture_expand_return(
    fs: &[SubmodularOracle],
    p: &BlockingFamily,
    rounder: &dyn SaRounder,
) -> Result<FerOutcome> {
    let lp = solve_ma_lp(fs, p)?;
    fer_from_lp(fs, p, rounder, lp)
}

fn factor(after: &Rational, before: &Rational) -> f64 {
    if before.is_zero() {
        if after.is_zero() {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        to_f64(&(after / before))
    }
}

fn cost(cols: &[Column], fs: &[SubmodularOracle]) -> Rational {
    cols.iter().fold(Rational::zero(), |acc, c| acc + &c.weight * fs[c.agent].value(c.set))
}

fn coverage(cols: &[Column], n: usize) -> Vec<Rational> {
    let mut z = vec![Rational::zero(); n];
    for c in cols {
        for v in c.set.iter() {
            z[v] += &c.weight;
        }
    }
    z
}

/// Drops empty sets and merges equal (agent, set) columns.
fn normalize(cols: Vec<Column>) -> Vec<Column> {
    let mut merged: BTreeMap<(usize, u64), Rational> = BTreeMap::new();
    for c in cols {
        if c.set.is_empty() || c.weight.is_zero() {
            continue;
        }
        *merged.entry((c.agent, c.set.bits())).or_insert_with(Rational::zero) += c.weight;
    }
    merged.into_iter().map(|((agent, bits), weight)| Column { agent, set: Subset(bits), weight }).collect()
}

fn check_feasible(stage: &'static str, p: &BlockingFamily, z: &[Rational]) -> Result<()> {
    match p.separate(z)? {
        None => Ok(()),
        Some(b) => Err(Error::Stage {
            stage,
            message: format!("blocker member {} is under-covered", p.ground().format_subset(b)),
        }),
    }
}

fn pow2_inv(j: usize) -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1u8) << j)
}

/// Bin index j with z ∈ (2^{−(j+1)}, 2^{−j}]; values ≥ 1 go to bin 0.
fn bin_of(z: &Rational) -> usize {
    let mut j = 0;
    while z <= &pow2_inv(j + 1) {
        j += 1;
    }
    j
}

/// Runs the stages on a given multi-agent LP solution.
pub fn fer_from_lp(
    fs: &[SubmodularOracle],
    p: &BlockingFamily,
    rounder: &dyn SaRounder,
    lp: CoveringLPSolution,
) -> Result<FerOutcome> {
    let n = p.n();
    let k = fs.len();
    if lp.k() != k {
        return Err(Error::ArityMismatch { expected: lp.k(), got: k });
    }
    let nf = n.max(1) as f64;
    let log_bins = (2.0 * nf).log2().ceil();
    let mut stages = Vec::new();
    let mut push = |stage: &str, cost: Rational, prev: &Rational, bound: f64| {
        stages.push(StageRecord { stage: stage.into(), factor: factor(&cost, prev), cost, bound });
    };

    let cost0 = cost(&lp.columns, fs);
    let z0 = coverage(&lp.columns, n);

    // Drop elements of mass ≤ 1/(2n), double the rest.
    let small_cut = Rational::one() / Rational::from_integer((2 * n.max(1)).into());
    let small = Subset::from_iter((0..n).filter(|&v| z0[v] <= small_cut));
    let two = Rational::from_integer(2.into());
    let cols1 = normalize(
        lp.columns
            .iter()
            .map(|c| Column { agent: c.agent, set: c.set.difference(small), weight: &c.weight * &two })
            .collect(),
    );
    let z1 = coverage(&cols1, n);
    check_feasible("drop-and-double", p, &z1)?;
    let cost1 = cost(&cols1, fs);
    push("drop-and-double", cost1.clone(), &cost0, 2.0);

    // Double again, then truncate every element's coverage down to its bin's power of two.
    let target: Vec<Option<(usize, Rational)>> = (0..n)
        .map(|v| {
            (!z1[v].is_zero()).then(|| {
                let j = bin_of(&z1[v]);
                (j, pow2_inv(j))
            })
        })
        .collect();
    let mut cols2: Vec<Column> =
        cols1.iter().map(|c| Column { agent: c.agent, set: c.set, weight: &c.weight * &two }).collect();
    for v in 0..n {
        let Some((_, t)) = &target[v] else { continue };
        let mut running = Rational::zero();
        let mut i = 0;
        while i < cols2.len() {
            if cols2[i].set.contains(v) {
                if &running >= t {
                    cols2[i].set = cols2[i].set.without(v);
                } else if &(&running + &cols2[i].weight) <= t {
                    running += &cols2[i].weight;
                } else {
                    let need = t - &running;
                    let rest = &cols2[i].weight - &need;
                    let split = Column { agent: cols2[i].agent, set: cols2[i].set.without(v), weight: rest };
                    cols2[i].weight = need;
                    cols2.push(split);
                    running = t.clone();
                }
            }
            i += 1;
        }
    }
    let cols2 = normalize(cols2);
    let z2 = coverage(&cols2, n);
    for v in 0..n {
        let expect = target[v].as_ref().map_or_else(Rational::zero, |(_, t)| t.clone());
        if z2[v] != expect {
            return Err(Error::Stage { stage: "round-up", message: format!("element {v} has coverage {}", z2[v]) });
        }
    }
    check_feasible("round-up", p, &z2)?;
    let cost2 = cost(&cols2, fs);
    push("round-up", cost2.clone(), &cost1, 2.0);

    // Fracture every column along the bins.
    let mut bins: BTreeMap<usize, Subset> = BTreeMap::new();
    for (v, t) in target.iter().enumerate() {
        if let Some((j, _)) = t {
            let e = bins.entry(*j).or_insert(Subset::EMPTY);
            *e = e.with(v);
        }
    }
    let cols3 = normalize(
        cols2
            .iter()
            .flat_map(|c| {
                bins.values().map(move |&zj| Column { agent: c.agent, set: c.set.intersection(zj), weight: c.weight.clone() })
            })
            .collect(),
    );
    check_feasible("fracture", p, &coverage(&cols3, n))?;
    let cost3 = cost(&cols3, fs);
    push("fracture", cost3.clone(), &cost2, bins.len() as f64);

    // Per bin: expand by r_j = 2^j, cover Z_j greedily, return with weight 1/r_j.
    let mut returned: Vec<(usize, Subset, Rational)> = Vec::new();
    let mut cols5 = Vec::new();
    let mut greedy_ratio: f64 = 0.0;
    for (&j, &zj) in &bins {
        let in_bin: Vec<&Column> = cols3.iter().filter(|c| c.set.is_subset_of(zj)).collect();
        let candidates: Vec<CoverCandidate> = in_bin
            .iter()
            .map(|c| CoverCandidate { agent: c.agent, set: c.set, cost: fs[c.agent].value(c.set) })
            .collect();
        let picks = greedy_set_cover(zj, &candidates).map_err(|e| Error::Stage { stage: "cover", message: e.to_string() })?;
        let r = Rational::from_integer(num_bigint::BigInt::from(1u8) << j);
        let expanded = in_bin.iter().fold(Rational::zero(), |acc, c| acc + &c.weight * fs[c.agent].value(c.set)) * &r;
        let mut integral = Rational::zero();
        for (idx, u) in picks {
            let agent = candidates[idx].agent;
            let cu = fs[agent].value(u);
            integral += &cu;
            returned.push((agent, u, cu));
            cols5.push(Column { agent, set: u, weight: pow2_inv(j) });
        }
        greedy_ratio = greedy_ratio.max(factor(&integral, &expanded));
    }
    let zhat = coverage(&cols5, n);
    check_feasible("return", p, &zhat)?;
    let cost5 = cost(&cols5, fs);
    push("cover-and-return", cost5.clone(), &cost3, nf.ln());

    // g(S) = Σ_{U ∩ S ≠ ∅} c(U) over the returned laminar pieces.
    let pieces: Vec<(Subset, Rational)> = returned.iter().map(|(_, u, c)| (*u, c.clone())).collect();
    let g = SubmodularOracle::new(p.ground().clone(), "laminar-cover", Flags::ALL, move |s| {
        pieces.iter().filter(|(u, _)| !u.is_disjoint(s)).fold(Rational::zero(), |acc, (_, c)| acc + c)
    });
    let g_lovasz = lovasz(&g, &zhat)?.value;
    if g_lovasz != cost5 {
        return Err(Error::Stage {
            stage: "return",
            message: format!("laminar extension value {g_lovasz} differs from returned cost {cost5}"),
        });
    }
    let q = rounder.round(&g, p, &zhat).map_err(|e| Error::Stage { stage: "sa-round", message: e.to_string() })?;
    let mut parts = vec![Subset::EMPTY; k];
    for (agent, u, _) in &returned {
        let piece = u.intersection(q);
        parts[*agent] = parts[*agent].union(piece);
    }
    let tuple = disjointify(&SetTuple::new(parts));
    if !p.contains(tuple.union()) {
        return Err(Error::Stage { stage: "sa-round", message: "rounded union is not in the family".into() });
    }
    let solution = MultiAgentSolution::from_agents(tuple, fs)?;
    let alpha = rounder.alpha(p).unwrap_or(f64::INFINITY);
    push("sa-round", solution.total.clone(), &cost5, alpha);

    let measured_product = stages.iter().map(|s| s.factor).product();
    let bound_product = 4.0 * log_bins * nf.ln() * alpha;
    let trace = FerTrace {
        lp_objective: lp.objective.clone(),
        stages,
        bins: bins.keys().copied().collect(),
        greedy_ratio,
        measured_product,
        bound_product,
    };
    Ok(FerOutcome { solution, trace, lp })
}
