//! Exhaustive optima for desk-scale verification.

use crate::blockers::BlockingFamily;
use crate::error::{cap_check, Error, Result};
use crate::lifting::{AgentFamily, BaseFamily};
use crate::maximize::robust_value;
use crate::oracles::{MultivariateOracle, SubmodularOracle};
use crate::rational::Rational;
use crate::subset::{all_subsets, SetTuple, Subset};

pub const ASSIGNMENT_CAP: u64 = 1 << 22;

/// Visits every tuple of pairwise-disjoint sets, i.e. every map V → {none, 0..k}.
/// Stops early when `visit` returns false.
pub fn for_each_disjoint_tuple(n: usize, k: usize, visit: &mut dyn FnMut(&SetTuple) -> bool) -> Result<()> {
    let choices = k as u64 + 1;
    cap_check("disjoint tuples", choices.checked_pow(n as u32).unwrap_or(u64::MAX), ASSIGNMENT_CAP)?;
    let mut code = vec![0usize; n];
    let mut tuple = SetTuple::empty(k);
    loop {
        if !visit(&tuple) {
            return Ok(());
        }
        // Odometer increment; digit 0 means unassigned.
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(());
            }
            if code[pos] > 0 {
                tuple.0[code[pos] - 1] = tuple.0[code[pos] - 1].without(pos);
            }
            code[pos] += 1;
            if code[pos] <= k {
                tuple.0[code[pos] - 1] = tuple.0[code[pos] - 1].with(pos);
                break;
            }
            code[pos] = 0;
            pos += 1;
        }
    }
}

fn better_min(best: &mut Option<(SetTuple, Rational)>, t: &SetTuple, v: Rational) {
    if best.as_ref().is_none_or(|(_, b)| &v < b) {
        *best = Some((t.clone(), v));
    }
}

/// min f(S) over S ∈ F↑.
pub fn brute_min_sa(f: &SubmodularOracle, p: &BlockingFamily) -> Result<(Subset, Rational)> {
    cap_check("ground set size", f.n() as u64, 22)?;
    let mut best: Option<(Subset, Rational)> = None;
    for s in all_subsets(f.n()).filter(|&s| p.contains(s)) {
        let v = f.value(s);
        if best.as_ref().is_none_or(|(_, b)| &v < b) {
            best = Some((s, v));
        }
    }
    best.ok_or_else(|| Error::Infeasible("upward closure is empty".into()))
}

/// min Σ f_i(S_i) over disjoint tuples whose union lies in F↑.
pub fn brute_min_ma(fs: &[SubmodularOracle], p: &BlockingFamily) -> Result<(SetTuple, Rational)> {
    let mut best = None;
    for_each_disjoint_tuple(p.n(), fs.len(), &mut |t| {
        if p.contains(t.union()) {
            let v = fs.iter().zip(t.parts()).fold(Rational::default(), |a, (f, &s)| a + f.value(s));
            better_min(&mut best, t, v);
        }
        true
    })?;
    best.ok_or_else(|| Error::Infeasible("upward closure is empty".into()))
}

/// min g(S_1, …, S_k) over disjoint tuples whose union lies in F↑.
pub fn brute_min_mv(g: &MultivariateOracle, p: &BlockingFamily) -> Result<(SetTuple, Rational)> {
    let mut best = None;
    for_each_disjoint_tuple(p.n(), g.k(), &mut |t| {
        if p.contains(t.union()) {
            better_min(&mut best, t, g.value(t));
        }
        true
    })?;
    best.ok_or_else(|| Error::Infeasible("upward closure is empty".into()))
}

/// min Σ f_i(S_i) over partitions of V with S_i ⊆ V_i and, if given, |S_i| ≤ b_i.
pub fn brute_msca(
    fs: &[SubmodularOracle],
    regions: &[Subset],
    caps: Option<&[usize]>,
) -> Result<(SetTuple, Rational)> {
    let n = fs.first().map(|f| f.n()).unwrap_or(0);
    let full = Subset::full(n);
    let mut best = None;
    for_each_disjoint_tuple(n, fs.len(), &mut |t| {
        let ok = t.union() == full
            && t.parts().iter().zip(regions).all(|(s, r)| s.is_subset_of(*r))
            && caps.is_none_or(|b| t.parts().iter().zip(b).all(|(s, &c)| s.len() <= c));
        if ok {
            let v = fs.iter().zip(t.parts()).fold(Rational::default(), |a, (f, &s)| a + f.value(s));
            better_min(&mut best, t, v);
        }
        true
    })?;
    best.ok_or_else(|| Error::Infeasible("no partition respects the regions and caps".into()))
}

/// Feasible tuples: disjoint, union ∈ F, S_i ∈ F_i.
fn feasible(t: &SetTuple, f: &BaseFamily, fs: &[AgentFamily]) -> bool {
    f.contains(t.union()) && fs.iter().zip(t.parts()).all(|(fi, &s)| fi.contains(s))
}

/// max g over feasible tuples.
pub fn brute_max_ma(g: &MultivariateOracle, f: &BaseFamily, fs: &[AgentFamily]) -> Result<(SetTuple, Rational)> {
    let mut best: Option<(SetTuple, Rational)> = None;
    for_each_disjoint_tuple(g.n(), g.k(), &mut |t| {
        if feasible(t, f, fs) {
            let v = g.value(t);
            if best.as_ref().is_none_or(|(_, b)| &v > b) {
                best = Some((t.clone(), v));
            }
        }
        true
    })?;
    best.ok_or_else(|| Error::Infeasible("no feasible tuple".into()))
}

/// max over feasible tuples of the robust value at τ.
pub fn brute_robust_max(
    g: &MultivariateOracle,
    f: &BaseFamily,
    fs: &[AgentFamily],
    tau: usize,
) -> Result<(SetTuple, Rational)> {
    let mut best: Option<(SetTuple, Rational)> = None;
    let mut err = None;
    for_each_disjoint_tuple(g.n(), g.k(), &mut |t| {
        if feasible(t, f, fs) {
            match robust_value(g, t, tau) {
                Ok(v) => {
                    if best.as_ref().is_none_or(|(_, b)| &v > b) {
                        best = Some((t.clone(), v));
                    }
                }
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            }
        }
        true
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    best.ok_or_else(|| Error::Infeasible("no feasible tuple".into()))
}
