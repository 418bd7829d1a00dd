//! Exhaustive brute-force checks of submodularity, multi-submodularity and monotonicity.

use std::ops::Sub;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{MultivariateOracle, SubmodularOracle};
use crate::error::{cap_check, Error, Result};
use crate::rational::{lcm_of_denominators, Rational};
use crate::subset::{SetTuple, Subset};

pub const DEFAULT_CAP: usize = 16;
pub const DEFAULT_MV_CAP: usize = 12;

/// f(S+v) − f(S) < f(T+v) − f(T) with S ⊆ T, v ∉ T.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmodularWitness {
    pub s: Subset,
    pub t: Subset,
    pub v: usize,
    pub marginal_at_s: Rational,
    pub marginal_at_t: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubmodularityVerdict {
    Holds,
    Witness(SubmodularWitness),
}

impl SubmodularityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SubmodularityVerdict::Holds)
    }
}

/// Assigning `first` to the tuple gains less than it does after `second` was assigned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisubmodularWitness {
    pub tuple: SetTuple,
    /// (agent, element) whose marginal increases.
    pub first: (usize, usize),
    /// (agent, element) assigned in between.
    pub second: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultisubmodularityVerdict {
    Holds,
    Witness(MultisubmodularWitness),
}

impl MultisubmodularityVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, MultisubmodularityVerdict::Holds)
    }
}

/// Values rescaled to a common denominator when they fit in i128, which makes the
/// exhaustive loops cheap; exactness is unaffected.
enum Table {
    Small(Vec<i128>),
    Big(Vec<Rational>),
}

impl Table {
    fn new(values: Vec<Rational>) -> Table {
        let l = lcm_of_denominators(&values);
        let limit = BigInt::from(1u128 << 120);
        let scaled: Option<Vec<i128>> = values
            .iter()
            .map(|q| {
                let x = q.numer() * (&l / q.denom());
                if x.abs() > limit {
                    None
                } else {
                    x.to_i128()
                }
            })
            .collect();
        match scaled {
            Some(s) => Table::Small(s),
            None => Table::Big(values),
        }
    }
}

/// Local diminishing-returns check over a value table on `n` elements:
/// f(S+v) − f(S) ≥ f(S+u+v) − f(S+u). Triples come in ascending (S, v, u) order.
fn local_violations<T>(table: &[T], n: usize, first_only: bool) -> Vec<(Subset, usize, usize)>
where
    T: Ord,
    for<'a> &'a T: Sub<&'a T, Output = T>,
{
    let mut out = Vec::new();
    for s in crate::subset::all_subsets(n) {
        let outside: Vec<usize> = (0..n).filter(|&v| !s.contains(v)).collect();
        for &v in &outside {
            let sv = s.with(v);
            let gain = &table[sv.bits() as usize] - &table[s.bits() as usize];
            for &u in &outside {
                if u == v {
                    continue;
                }
                let su = s.with(u);
                let later = &table[su.with(v).bits() as usize] - &table[su.bits() as usize];
                if gain < later {
                    out.push((s, v, u));
                    if first_only {
                        return out;
                    }
                }
            }
        }
    }
    out
}

fn dispatch_local(values: &[Rational], n: usize, first_only: bool) -> Vec<(Subset, usize, usize)> {
    match Table::new(values.to_vec()) {
        Table::Small(t) => local_violations(&t, n, first_only),
        Table::Big(t) => local_violations(&t, n, first_only),
    }
}

fn witness(values: &[Rational], (s, v, u): (Subset, usize, usize)) -> SubmodularWitness {
    let t = s.with(u);
    SubmodularWitness {
        s,
        t,
        v,
        marginal_at_s: &values[s.with(v).bits() as usize] - &values[s.bits() as usize],
        marginal_at_t: &values[t.with(v).bits() as usize] - &values[t.bits() as usize],
    }
}

pub fn validate_submodular(f: &SubmodularOracle) -> Result<SubmodularityVerdict> {
    validate_submodular_with_cap(f, DEFAULT_CAP)
}

/// Exhaustive check; the local form with T = S+u is equivalent to the S ⊆ T form.
pub fn validate_submodular_with_cap(f: &SubmodularOracle, cap: usize) -> Result<SubmodularityVerdict> {
    let values = f.value_table(cap)?;
    Ok(match dispatch_local(&values, f.n(), true).first() {
        None => SubmodularityVerdict::Holds,
        Some(&hit) => SubmodularityVerdict::Witness(witness(&values, hit)),
    })
}

/// Every local violation (S, S+u, v), in ascending order.
pub fn submodularity_violations(f: &SubmodularOracle, cap: usize) -> Result<Vec<SubmodularWitness>> {
    let values = f.value_table(cap)?;
    Ok(dispatch_local(&values, f.n(), false).into_iter().map(|h| witness(&values, h)).collect())
}

/// First (S, v) with f(S+v) < f(S), if any.
pub fn validate_monotone(f: &SubmodularOracle, cap: usize) -> Result<Option<(Subset, usize)>> {
    let values = f.value_table(cap)?;
    Ok(first_decrease(&values, f.n()))
}

fn first_decrease(values: &[Rational], n: usize) -> Option<(Subset, usize)> {
    for s in crate::subset::all_subsets(n) {
        for v in (0..n).filter(|&v| !s.contains(v)) {
            if values[s.with(v).bits() as usize] < values[s.bits() as usize] {
                return Some((s, v));
            }
        }
    }
    None
}

fn tuple_of(mask: Subset, n: usize, k: usize) -> SetTuple {
    let full = Subset::full(n).bits();
    SetTuple::new((0..k).map(|i| Subset((mask.bits() >> (i * n)) & full)).collect())
}

/// Values of g over every tuple, indexed by the agent-major lifted bitmask.
pub fn tuple_table(g: &MultivariateOracle, cap: usize) -> Result<Vec<Rational>> {
    let (n, k) = (g.n(), g.k());
    cap_check("k·n", (k * n) as u64, cap as u64)?;
    Ok(crate::subset::all_subsets(k * n).map(|m| g.value(&tuple_of(m, n, k))).collect())
}

pub fn validate_multisubmodular(g: &MultivariateOracle) -> Result<MultisubmodularityVerdict> {
    validate_multisubmodular_with_cap(g, DEFAULT_MV_CAP)
}

/// Runs both the marginal-gain checker and the union/intersection checker and
/// reports an error if they disagree.
pub fn validate_multisubmodular_with_cap(g: &MultivariateOracle, cap: usize) -> Result<MultisubmodularityVerdict> {
    let values = tuple_table(g, cap)?;
    let (n, k) = (g.n(), g.k());
    let dr = dispatch_local(&values, k * n, true).first().copied();
    let lattice = lattice_violation(&values, k * n);
    if dr.is_some() != lattice.is_some() {
        return Err(Error::InvalidInput(format!(
            "multi-submodularity checkers disagree on {}: marginal form {:?}, lattice form {:?}",
            g.name(),
            dr,
            lattice
        )));
    }
    Ok(match dr {
        None => MultisubmodularityVerdict::Holds,
        Some((s, v, u)) => MultisubmodularityVerdict::Witness(MultisubmodularWitness {
            tuple: tuple_of(s, n, k),
            first: (v / n, v % n),
            second: (u / n, u % n),
        }),
    })
}

/// First pair of tuples (S, T) with g(S) + g(T) < g(S∪T) + g(S∩T), componentwise.
pub fn multisubmodular_lattice_witness(g: &MultivariateOracle, cap: usize) -> Result<Option<(SetTuple, SetTuple)>> {
    let values = tuple_table(g, cap)?;
    let (n, k) = (g.n(), g.k());
    Ok(lattice_violation(&values, k * n).map(|(s, t)| (tuple_of(s, n, k), tuple_of(t, n, k))))
}

fn lattice_violation(values: &[Rational], m: usize) -> Option<(Subset, Subset)> {
    fn scan<T>(t: &[T], m: usize) -> Option<(Subset, Subset)>
    where
        T: Ord + Clone,
        for<'a> &'a T: std::ops::Add<&'a T, Output = T>,
    {
        let size = 1usize << m;
        for a in 0..size {
            for b in a + 1..size {
                // Comparable pairs satisfy the inequality with equality.
                if a & b == a || a & b == b {
                    continue;
                }
                if &t[a] + &t[b] < &t[a | b] + &t[a & b] {
                    return Some((Subset(a as u64), Subset(b as u64)));
                }
            }
        }
        None
    }
    match Table::new(values.to_vec()) {
        Table::Small(t) => scan(&t, m),
        Table::Big(t) => scan(&t, m),
    }
}

/// First tuple and assignment (i, v) that lowers g, if any.
pub fn validate_multimonotone(g: &MultivariateOracle, cap: usize) -> Result<Option<(SetTuple, (usize, usize))>> {
    let values = tuple_table(g, cap)?;
    let (n, k) = (g.n(), g.k());
    Ok(first_decrease(&values, k * n).map(|(s, e)| (tuple_of(s, n, k), (e / n, e % n))))
}

pub fn is_nonnegative(f: &SubmodularOracle, cap: usize) -> Result<bool> {
    Ok(f.value_table(cap)?.iter().all(|v| !v.is_negative()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::*;
    use crate::rational::int;
    use crate::subset::GroundSet;

    #[test]
    fn modular_and_coverage_hold() {
        let f = make_modular(GroundSet::indexed(4), vec![int(1), int(-2), int(3), int(0)]).unwrap();
        assert!(validate_submodular(&f).unwrap().holds());
        let cov = make_coverage(
            GroundSet::indexed(3),
            vec![Subset::from_iter([0, 1]), Subset::from_iter([1, 2]), Subset::from_iter([2, 3, 4])],
            None,
        )
        .unwrap();
        assert!(validate_submodular(&cov).unwrap().holds());
        assert_eq!(validate_monotone(&cov, 16).unwrap(), None);
    }

    #[test]
    fn goel_first_witness() {
        let c = make_goel_allocation();
        let g = c.ground().clone();
        let SubmodularityVerdict::Witness(w) = validate_submodular(&c).unwrap() else {
            panic!("allocation cost should not be submodular");
        };
        assert_eq!(w.s, g.subset(&["A"]).unwrap());
        assert_eq!(w.t, g.subset(&["A", "C"]).unwrap());
        assert_eq!(w.v, 1);
        assert_eq!((w.marginal_at_s, w.marginal_at_t), (int(0), int(1)));
    }

    #[test]
    fn cap_refusal() {
        let f = make_modular(GroundSet::indexed(17), vec![int(1); 17]).unwrap();
        assert!(matches!(validate_submodular(&f), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn quadratic_both_directions() {
        let g = GroundSet::indexed(2);
        let good = make_quadratic(g.clone(), vec![vec![int(0), int(-1)], vec![int(0), int(0)]], None).unwrap();
        assert!(validate_multisubmodular(&good).unwrap().holds());
        let identity = make_quadratic(g, vec![vec![int(1), int(0)], vec![int(0), int(1)]], None).unwrap();
        let MultisubmodularityVerdict::Witness(w) = validate_multisubmodular(&identity).unwrap() else {
            panic!("identity matrix violates the condition on the diagonal");
        };
        // The violation pairs two elements given to the same agent.
        assert_eq!(w.first.0, w.second.0);
        assert!(multisubmodular_lattice_witness(&identity, 12).unwrap().is_some());
    }

    #[test]
    fn decomposable_holds() {
        let g = GroundSet::indexed(3);
        let f1 = make_concave_of_cardinality(g.clone(), vec![int(0), int(3), int(5), int(6)]).unwrap();
        let f2 = make_cut_function(&crate::graph::Graph::complete(3), None).unwrap();
        let mv = make_decomposable(vec![f1, f2]).unwrap();
        assert!(validate_multisubmodular(&mv).unwrap().holds());
    }
}
