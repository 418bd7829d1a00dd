//! Lovász extension, level sets, unconstrained and ring-constrained submodular minimization.

mod minnorm;

pub use minnorm::{sfm_min_norm, sfm_min_norm_with, MinNormConfig};

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::blockers::Clutter;
use crate::error::{cap_check, Error, Result};
use crate::lifting::lift_oracle;
use crate::oracles::{MultivariateOracle, SubmodularOracle};
use crate::rational::Rational;
use crate::subset::{all_subsets, GroundSet, SetTuple, Subset};

pub const BRUTE_CAP: usize = 24;
pub const RING_MEMBER_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LovaszEvaluation {
    pub value: Rational,
    /// Decreasing chain of level sets with weights v_{i+1} − v_i; zero weights omitted.
    pub levels: Vec<(Subset, Rational)>,
}

fn check_box(n: usize, z: &[Rational]) -> Result<()> {
    if z.len() != n {
        return Err(Error::DomainMismatch(format!("point has {} entries, ground set {n}", z.len())));
    }
    if z.iter().any(|x| x.is_negative() || x > &Rational::one()) {
        return Err(Error::Precondition("point outside [0,1]^V".into()));
    }
    Ok(())
}

/// f^L(z) = Σ_{i=0..m} (v_{i+1} − v_i)·f({j : z_j > v_i}) over the distinct positive
/// values 0 = v_0 < v_1 < … < v_m, with v_{m+1} = 1.
pub fn lovasz(f: &SubmodularOracle, z: &[Rational]) -> Result<LovaszEvaluation> {
    check_box(f.n(), z)?;
    let mut values: Vec<&Rational> = z.iter().filter(|x| x.is_positive()).collect();
    values.sort();
    values.dedup();
    let zero = Rational::zero();
    let one = Rational::one();
    let mut thresholds = vec![&zero];
    thresholds.extend(values);
    let mut levels = Vec::new();
    let mut value = Rational::zero();
    for (i, &v) in thresholds.iter().enumerate() {
        let next = thresholds.get(i + 1).copied().unwrap_or(&one);
        let w = next - v;
        if w.is_zero() {
            continue;
        }
        let s = Subset::from_iter((0..z.len()).filter(|&j| &z[j] > v));
        value += &w * f.value(s);
        levels.push((s, w));
    }
    Ok(LovaszEvaluation { value, levels })
}

/// Column weights x(S) on the chain with Σ x(S)·f(S) = f^L(z) for normalized f
/// and Σ x(S)·χ^S = z. Empty levels are dropped.
pub fn level_set_decomposition(f: &SubmodularOracle, z: &[Rational]) -> Result<Vec<(Subset, Rational)>> {
    Ok(lovasz(f, z)?.levels.into_iter().filter(|(s, _)| !s.is_empty()).collect())
}

/// Vertex of the base polytope from the greedy order: q(π_i) = f(S_i) − f(S_{i−1}).
pub fn greedy_vertex(f: &SubmodularOracle, order: &[usize]) -> Vec<Rational> {
    let mut q = vec![Rational::zero(); f.n()];
    let mut prefix = Subset::EMPTY;
    let mut prev = f.value(prefix);
    for &v in order {
        prefix = prefix.with(v);
        let cur = f.value(prefix);
        q[v] = &cur - &prev;
        prev = cur;
    }
    q
}

/// Exact global minimizer; ties go to the smallest bitmask.
pub fn sfm_brute(f: &SubmodularOracle) -> Result<(Subset, Rational)> {
    cap_check("ground set size", f.n() as u64, BRUTE_CAP as u64)?;
    let mut best = (Subset::EMPTY, f.value_uncached(Subset::EMPTY));
    for s in all_subsets(f.n()).skip(1) {
        let v = f.value_uncached(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    Ok(best)
}

/// {S : L ⊆ S ⊆ U and S closed under the implications u → w}.
#[derive(Clone, PartialEq, Eq)]
pub struct RingFamily {
    ground: GroundSet,
    implications: Vec<(usize, usize)>,
    lower: Subset,
    upper: Subset,
    reach: Vec<Subset>,
    coreach: Vec<Subset>,
}

impl fmt::Debug for RingFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingFamily(n={}, {:?}, L={:?}, U={:?})", self.ground.len(), self.implications, self.lower, self.upper)
    }
}

impl RingFamily {
    /// L is replaced by its closure; errors if that leaves U.
    pub fn new(ground: GroundSet, implications: Vec<(usize, usize)>, lower: Subset, upper: Subset) -> Result<Self> {
        let n = ground.len();
        ground.check(lower)?;
        ground.check(upper)?;
        if let Some(&(a, b)) = implications.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(Error::DomainMismatch(format!("implication {a}→{b} outside ground set")));
        }
        let mut reach: Vec<Subset> = (0..n).map(Subset::singleton).collect();
        loop {
            let mut grew = false;
            for &(a, b) in &implications {
                for r in reach.iter_mut() {
                    if r.contains(a) && !r.contains(b) {
                        *r = r.union(Subset::singleton(b));
                        grew = true;
                    }
                }
            }
            for v in 0..n {
                let extra = reach[v].iter().fold(reach[v], |acc, u| acc.union(reach[u]));
                if extra != reach[v] {
                    reach[v] = extra;
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        let coreach = (0..n).map(|w| Subset::from_iter((0..n).filter(|&u| reach[u].contains(w)))).collect();
        let closed_lower = lower.iter().fold(lower, |acc, v| acc.union(reach[v]));
        if !closed_lower.is_subset_of(upper) {
            return Err(Error::InvalidInput(format!(
                "forced elements {:?} (after closure) are not within the allowed set {:?}",
                closed_lower, upper
            )));
        }
        Ok(RingFamily { ground, implications, lower: closed_lower, upper, reach, coreach })
    }

    pub fn free(ground: GroundSet) -> Self {
        let full = ground.full();
        Self::new(ground, Vec::new(), Subset::EMPTY, full).expect("free ring")
    }

    pub fn interval(ground: GroundSet, lower: Subset, upper: Subset) -> Result<Self> {
        Self::new(ground, Vec::new(), lower, upper)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn implications(&self) -> &[(usize, usize)] {
        &self.implications
    }

    pub fn lower(&self) -> Subset {
        self.lower
    }

    pub fn upper(&self) -> Subset {
        self.upper
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.lower.is_subset_of(s)
            && s.is_subset_of(self.upper)
            && self.implications.iter().all(|&(a, b)| !s.contains(a) || s.contains(b))
    }

    /// Smallest closed superset of S (may leave U).
    pub fn closure(&self, s: Subset) -> Subset {
        s.iter().fold(s.union(self.lower), |acc, v| acc.union(self.reach[v]))
    }

    /// Visits members in increasing bitmask order until `visit` returns false.
    pub fn for_each_member(&self, visit: &mut dyn FnMut(Subset) -> bool) {
        let n = self.ground.len();
        let outside = self.ground.full().difference(self.upper);
        let out = outside.iter().fold(outside, |acc, w| acc.union(self.coreach[w]));
        if !self.lower.is_disjoint(out) {
            return;
        }
        self.descend(n as isize - 1, self.lower, out, visit);
    }

    fn descend(&self, v: isize, inn: Subset, out: Subset, visit: &mut dyn FnMut(Subset) -> bool) -> bool {
        if v < 0 {
            return visit(inn);
        }
        let u = v as usize;
        if inn.contains(u) || out.contains(u) {
            return self.descend(v - 1, inn, out, visit);
        }
        // Excluding u first keeps the output in increasing numeric order.
        let out2 = out.union(self.coreach[u]);
        if inn.is_disjoint(out2) && !self.descend(v - 1, inn, out2, visit) {
            return false;
        }
        let in2 = inn.union(self.reach[u]);
        if in2.is_disjoint(out) && !self.descend(v - 1, in2, out, visit) {
            return false;
        }
        true
    }

    pub fn members_up_to(&self, limit: usize) -> Result<Vec<Subset>> {
        let mut out = Vec::new();
        self.for_each_member(&mut |s| {
            out.push(s);
            out.len() < limit
        });
        Ok(out)
    }

    pub fn count_members(&self, cap: u64) -> Result<u64> {
        let mut count = 0u64;
        self.for_each_member(&mut |_| {
            count += 1;
            count <= cap
        });
        cap_check("ring members", count, cap)?;
        Ok(count)
    }
}

/// Exact minimum over ring members by enumeration; ties go to the smallest bitmask.
pub fn sfm_ring(f: &SubmodularOracle, r: &RingFamily) -> Result<(Subset, Rational)> {
    if f.ground() != r.ground() {
        return Err(Error::DomainMismatch("oracle and ring on different ground sets".into()));
    }
    let mut count = 0u64;
    let mut best: Option<(Subset, Rational)> = None;
    r.for_each_member(&mut |s| {
        count += 1;
        if count > RING_MEMBER_CAP {
            return false;
        }
        let v = f.value_uncached(s);
        if best.as_ref().is_none_or(|(_, b)| &v < b) {
            best = Some((s, v));
        }
        true
    });
    cap_check("ring members", count, RING_MEMBER_CAP)?;
    best.ok_or_else(|| Error::Infeasible("ring family is empty".into()))
}

/// Minimizes a multivariate g over a ring of tuples given on the lifted index space.
pub fn sfm_mv_ring(g: &MultivariateOracle, d: &RingFamily) -> Result<(SetTuple, Rational)> {
    let f = lift_oracle(g)?;
    if f.ground().len() != d.ground().len() {
        return Err(Error::ArityMismatch { expected: f.ground().len(), got: d.ground().len() });
    }
    let d = RingFamily::new(f.ground().clone(), d.implications().to_vec(), d.lower(), d.upper())?;
    let (s, v) = sfm_ring(&f, &d)?;
    let lifted = crate::lifting::LiftedGroundSet::new(g.ground().clone(), g.k())?;
    Ok((lifted.unlift(s), v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DualVerdict {
    Feasible,
    /// A set with f(S) < z_y(S).
    Violated(Subset),
}

/// Checks f − z_y ≥ 0 where z_y(v) = Σ_{B ∋ v} y_B.
pub fn dual_feasible(f: &SubmodularOracle, y: &[Rational], c: &Clutter) -> Result<DualVerdict> {
    if y.len() != c.len() {
        return Err(Error::ArityMismatch { expected: c.len(), got: y.len() });
    }
    if y.iter().any(|x| x.is_negative()) {
        return Err(Error::Precondition("dual weights must be nonnegative".into()));
    }
    if f.ground() != c.ground() {
        return Err(Error::DomainMismatch("oracle and clutter on different ground sets".into()));
    }
    let mut load = vec![Rational::zero(); f.n()];
    for (b, w) in c.members().iter().zip(y) {
        for v in b.iter() {
            load[v] += w;
        }
    }
    let h = f.minus_modular(load);
    let (s, v) = if f.n() <= crate::oracles::DEFAULT_CAP { sfm_brute(&h)? } else { sfm_min_norm(&h)? };
    Ok(if v.is_negative() { DualVerdict::Violated(s) } else { DualVerdict::Feasible })
}
