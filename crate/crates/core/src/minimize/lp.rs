//! The blocking covering LP: min Σ_i f_i^L(z_i) subject to Σ_i z_i ∈ P*(F), 0 ≤ z_i ≤ 1.
//!
//! Solved in floating point (subgradient warm start, then cutting planes), snapped to
//! nearby rationals and repaired so the returned point is feasible in exact arithmetic.

use std::collections::{BTreeSet, HashMap};

use minilp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::blockers::{mass, BlockerSource, BlockingFamily, Clutter};
use crate::error::{cap_check, Error, Result};
use crate::oracles::SubmodularOracle;
use crate::rational::{snap_tol, to_f64, Rational};
use crate::sfm::{greedy_vertex, level_set_decomposition, lovasz};
use crate::simplex::{minimize_covering, solve_square};
use crate::subset::{all_subsets, Subset};

/// Explicit blocker lists up to this size are loaded into the LP at once.
const UPFRONT_BLOCKERS: usize = 2000;
const FEAS_EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub agent: usize,
    pub set: Subset,
    #[serde(with = "crate::rational::serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LpDiagnostics {
    pub subgradient_iterations: usize,
    pub cutting_rounds: usize,
    pub vertex_cuts: usize,
    pub blocker_cuts: usize,
    /// Largest blocker deficit 1 − z(B) of the snapped point before repair.
    pub final_violation: f64,
    #[serde(with = "crate::rational::serde_str")]
    pub repair_scale: Rational,
    /// False when a round cap was hit or the fallback point was used.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringLPSolution {
    /// One point per agent; a single-agent solve has exactly one.
    #[serde(with = "nested_rationals")]
    pub z: Vec<Vec<Rational>>,
    pub columns: Vec<Column>,
    #[serde(with = "crate::rational::serde_str")]
    pub objective: Rational,
    pub diagnostics: LpDiagnostics,
}

mod nested_rationals {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|row| row.iter().map(crate::rational::format).collect::<Vec<_>>()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|row| {
                row.iter()
                    .map(|x| crate::rational::parse(x).ok_or_else(|| serde::de::Error::custom("malformed rational")))
                    .collect()
            })
            .collect()
    }
}

impl CoveringLPSolution {
    pub fn k(&self) -> usize {
        self.z.len()
    }

    /// Σ_i z_i, the point that must lie in P*(F).
    pub fn coverage(&self) -> Vec<Rational> {
        let n = self.z.first().map_or(0, Vec::len);
        (0..n).map(|v| self.z.iter().fold(Rational::zero(), |acc, zi| acc + &zi[v])).collect()
    }

    /// Σ x(S, i)·f_i(S) recomputed from the columns.
    pub fn column_cost(&self, fs: &[SubmodularOracle]) -> Rational {
        self.columns.iter().fold(Rational::zero(), |acc, c| acc + &c.weight * fs[c.agent].value(c.set))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LpConfig {
    /// Subgradient iterations before cutting planes; `None` means 50·n².
    pub warm_start_iterations: Option<usize>,
    pub max_rounds: usize,
    pub snap_tolerance: f64,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig { warm_start_iterations: None, max_rounds: 2000, snap_tolerance: 1e-9 }
    }
}

pub fn solve_sa_lp(f: &SubmodularOracle, p: &BlockingFamily) -> Result<CoveringLPSolution> {
    solve_ma_lp_with(std::slice::from_ref(f), p, &LpConfig::default())
}

pub fn solve_ma_lp(fs: &[SubmodularOracle], p: &BlockingFamily) -> Result<CoveringLPSolution> {
    solve_ma_lp_with(fs, p, &LpConfig::default())
}

struct Instance<'a> {
    fs: &'a [SubmodularOracle],
    p: &'a BlockingFamily,
    n: usize,
    k: usize,
    vertices: Vec<HashMap<Vec<usize>, Vec<f64>>>,
}

impl Instance<'_> {
    fn order(z: &[f64]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..z.len()).collect();
        order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
        order
    }

    /// A maximizer q of ⟨q, z⟩ over the base polytope of f_i, i.e. a subgradient of f_i^L at z.
    fn vertex(&mut self, agent: usize, z: &[f64]) -> Vec<f64> {
        let order = Self::order(z);
        let f = &self.fs[agent];
        self.vertices[agent]
            .entry(order)
            .or_insert_with_key(|order| greedy_vertex(f, order).iter().map(to_f64).collect())
            .clone()
    }

    /// Most violated blocker member at the combined point, with its mass.
    fn separate(&self, zc: &[f64]) -> Result<Option<(Subset, f64)>> {
        match self.p.source() {
            BlockerSource::Explicit(c) => {
                let mut best: Option<(Subset, f64)> = None;
                for &b in c.members() {
                    let m: f64 = b.iter().map(|v| zc[v]).sum();
                    if m < 1.0 - FEAS_EPS && best.is_none_or(|(_, bm)| m < bm) {
                        best = Some((b, m));
                    }
                }
                Ok(best)
            }
            BlockerSource::Oracle(_) => {
                let exact: Vec<Rational> = zc.iter().map(|&x| crate::rational::from_f64(x.max(0.0))).collect();
                Ok(self.p.separate(&exact)?.and_then(|b| {
                    let m: f64 = b.iter().map(|v| zc[v]).sum();
                    (m < 1.0 - FEAS_EPS).then_some((b, m))
                }))
            }
        }
    }

    fn combined(&self, z: &[Vec<f64>]) -> Vec<f64> {
        (0..self.n).map(|v| z.iter().map(|zi| zi[v]).sum()).collect()
    }
}

/// Solves the k-agent covering LP; k = 1 is the single-agent relaxation.
pub fn solve_ma_lp_with(fs: &[SubmodularOracle], p: &BlockingFamily, cfg: &LpConfig) -> Result<CoveringLPSolution> {
    let k = fs.len();
    if k == 0 {
        return Err(Error::InvalidInput("at least one agent is required".into()));
    }
    let n = p.n();
    for f in fs {
        if f.ground() != p.ground() {
            return Err(Error::DomainMismatch("oracle and blocking family on different ground sets".into()));
        }
        if !f.value(Subset::EMPTY).is_zero() {
            return Err(Error::Precondition(format!("{} is not normalized", f.name())));
        }
    }
    let mut inst = Instance { fs, p, n, k, vertices: vec![HashMap::new(); k] };
    let mut diag = LpDiagnostics { repair_scale: Rational::one(), converged: true, ..Default::default() };

    let mut orders: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); k];
    let mut blockers: BTreeSet<u64> = BTreeSet::new();
    if let Some(c) = p.explicit() {
        if c.len() <= UPFRONT_BLOCKERS {
            blockers.extend(c.members().iter().map(|b| b.bits()));
        }
    }
    let warm = warm_start(&mut inst, cfg, &mut diag, &mut orders, &mut blockers)?;

    let z_float = match cutting_planes(&mut inst, cfg, &mut diag, &orders, &blockers)? {
        Some(z) => z,
        None => {
            diag.converged = false;
            warm.unwrap_or_else(|| fallback_point(n, k))
        }
    };
    let mut z: Vec<Vec<Rational>> = z_float
        .iter()
        .map(|zi| zi.iter().map(|&x| clamp01(snap_tol(x, cfg.snap_tolerance))).collect())
        .collect();
    repair(&inst, &mut z, &mut diag)?;

    let mut objective = Rational::zero();
    let mut columns = Vec::new();
    for (agent, (f, zi)) in fs.iter().zip(&z).enumerate() {
        objective += lovasz(f, zi)?.value;
        columns.extend(
            level_set_decomposition(f, zi)?.into_iter().map(|(set, weight)| Column { agent, set, weight }),
        );
    }
    Ok(CoveringLPSolution { z, columns, objective, diagnostics: diag })
}

fn clamp01(x: Rational) -> Rational {
    if x.is_negative() {
        Rational::zero()
    } else if x > Rational::one() {
        Rational::one()
    } else {
        x
    }
}

fn fallback_point(n: usize, k: usize) -> Vec<Vec<f64>> {
    let mut z = vec![vec![0.0; n]; k];
    z[0] = vec![1.0; n];
    z
}

/// Projected subgradient on Σ f_i^L(z_i) + M·(1 − z(B))₊ with B the most violated member.
/// Records the vertex orders and blocker members it meets; returns the best feasible iterate.
fn warm_start(
    inst: &mut Instance<'_>,
    cfg: &LpConfig,
    diag: &mut LpDiagnostics,
    orders: &mut [BTreeSet<Vec<usize>>],
    blockers: &mut BTreeSet<u64>,
) -> Result<Option<Vec<Vec<f64>>>> {
    let (n, k) = (inst.n, inst.k);
    let iterations = cfg.warm_start_iterations.unwrap_or(50 * n * n);
    let penalty = 2.0 * inst.fs.iter().map(|f| to_f64(&f.value(Subset::full(n)))).sum::<f64>() + 1.0;
    let radius = ((n * k) as f64).sqrt();
    let mut z = vec![vec![1.0 / k as f64; n]; k];
    let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
    for t in 1..=iterations {
        diag.subgradient_iterations = t;
        let mut grads = Vec::with_capacity(k);
        let mut obj = 0.0;
        for i in 0..k {
            let q = inst.vertex(i, &z[i]);
            obj += q.iter().zip(&z[i]).map(|(a, b)| a * b).sum::<f64>();
            grads.push(q);
        }
        let violated = inst.separate(&inst.combined(&z))?;
        match violated {
            None => {
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, z.clone()));
                }
            }
            Some((b, _)) => {
                blockers.insert(b.bits());
                for g in grads.iter_mut() {
                    for v in b.iter() {
                        g[v] -= penalty;
                    }
                }
            }
        }
        let norm = grads.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let step = radius / (2.0 * (t as f64).sqrt() * norm);
        for (zi, g) in z.iter_mut().zip(&grads) {
            for (x, d) in zi.iter_mut().zip(g) {
                *x = (*x - step * d).clamp(0.0, 1.0);
            }
        }
    }
    if let Some((_, zb)) = &best {
        for (i, zi) in zb.iter().enumerate() {
            orders[i].insert(Instance::order(zi));
        }
    }
    Ok(best.map(|b| b.1))
}

struct Model {
    problem: Problem,
    z: Vec<Vec<Variable>>,
    t: Vec<Variable>,
}

impl Model {
    fn vertex_cut(&self, agent: usize, q: &[f64]) -> Vec<(Variable, f64)> {
        let mut expr = vec![(self.t[agent], 1.0)];
        expr.extend(self.z[agent].iter().zip(q).filter(|(_, &c)| c != 0.0).map(|(&v, &c)| (v, -c)));
        expr
    }

    fn blocker_cut(&self, b: Subset) -> Vec<(Variable, f64)> {
        self.z.iter().flat_map(|zi| b.iter().map(move |v| (zi[v], 1.0))).collect()
    }
}

/// Kelley cutting planes; `None` if the LP solver fails or the round cap is hit.
fn cutting_planes(
    inst: &mut Instance<'_>,
    cfg: &LpConfig,
    diag: &mut LpDiagnostics,
    orders: &[BTreeSet<Vec<usize>>],
    blockers: &BTreeSet<u64>,
) -> Result<Option<Vec<Vec<f64>>>> {
    let (n, k) = (inst.n, inst.k);
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let z: Vec<Vec<Variable>> = (0..k).map(|_| (0..n).map(|_| problem.add_var(0.0, (0.0, 1.0))).collect()).collect();
    let t: Vec<Variable> = (0..k).map(|_| problem.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let mut model = Model { problem, z, t };
    let identity: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let mut own = orders[i].clone();
        own.insert(identity.clone());
        for order in own {
            let q: Vec<f64> = greedy_vertex(&inst.fs[i], &order).iter().map(to_f64).collect();
            let cut = model.vertex_cut(i, &q);
            model.problem.add_constraint(cut, ComparisonOp::Ge, 0.0);
            diag.vertex_cuts += 1;
        }
    }
    for &b in blockers {
        let cut = model.blocker_cut(Subset(b));
        model.problem.add_constraint(cut, ComparisonOp::Ge, 1.0);
        diag.blocker_cuts += 1;
    }
    let mut solution = match model.problem.solve() {
        Ok(s) => s,
        Err(_) => return Ok(None),
    };
    for round in 1..=cfg.max_rounds {
        diag.cutting_rounds = round;
        let zval: Vec<Vec<f64>> =
            model.z.iter().map(|zi| zi.iter().map(|&v| *solution.var_value(v)).collect()).collect();
        let mut cuts: Vec<(Vec<(Variable, f64)>, f64)> = Vec::new();
        for i in 0..k {
            let q = inst.vertex(i, &zval[i]);
            let value: f64 = q.iter().zip(&zval[i]).map(|(a, b)| a * b).sum();
            let ti = *solution.var_value(model.t[i]);
            if value > ti + FEAS_EPS * (1.0 + value.abs()) {
                cuts.push((model.vertex_cut(i, &q), 0.0));
                diag.vertex_cuts += 1;
            }
        }
        if let Some((b, _)) = inst.separate(&inst.combined(&zval))? {
            cuts.push((model.blocker_cut(b), 1.0));
            diag.blocker_cuts += 1;
        }
        if cuts.is_empty() {
            return Ok(Some(zval));
        }
        for (cut, rhs) in &cuts {
            model.problem.add_constraint(cut.clone(), ComparisonOp::Ge, *rhs);
        }
        let mut warm = Some(solution);
        for (cut, rhs) in cuts {
            warm = warm.and_then(|s| s.add_constraint(cut, ComparisonOp::Ge, rhs).ok());
        }
        solution = match warm {
            Some(s) => s,
            None => match model.problem.solve() {
                Ok(s) => s,
                Err(_) => return Ok(None),
            },
        };
    }
    Ok(None)
}

/// Scales the point until every blocker member has mass ≥ 1, in exact arithmetic.
fn repair(inst: &Instance<'_>, z: &mut Vec<Vec<Rational>>, diag: &mut LpDiagnostics) -> Result<()> {
    let combined = |z: &Vec<Vec<Rational>>| -> Vec<Rational> {
        (0..inst.n).map(|v| z.iter().fold(Rational::zero(), |acc, zi| acc + &zi[v])).collect()
    };
    let mut first = true;
    for _ in 0..64 {
        let c = combined(z);
        let deficit = match inst.p.source() {
            BlockerSource::Explicit(cl) => {
                cl.members().iter().map(|&b| mass(&c, b)).filter(|m| m < &Rational::one()).min()
            }
            BlockerSource::Oracle(_) => inst.p.separate(&c)?.map(|b| mass(&c, b)),
        };
        let Some(m) = deficit else { return Ok(()) };
        if first {
            diag.final_violation = 1.0 - to_f64(&m);
            first = false;
        }
        if !m.is_positive() {
            break;
        }
        let scale = Rational::one() / &m;
        diag.repair_scale *= &scale;
        for zi in z.iter_mut() {
            for x in zi.iter_mut() {
                *x = clamp01(&*x * &scale);
            }
        }
    }
    diag.converged = false;
    let k = z.len();
    let n = inst.n;
    *z = vec![vec![Rational::zero(); n]; k];
    z[0] = vec![Rational::one(); n];
    if inst.p.separate(&combined(z))?.is_some() {
        return Err(Error::Infeasible("V itself is not in the upward closure".into()));
    }
    Ok(())
}

pub const EXACT_MODULAR_CAP: usize = 6;
pub const EXACT_GENERAL_CAP: usize = 5;

/// Exact optimum of the covering LP for a small explicit blocker.
///
/// Modular f: enumerate vertices of {z ≥ 0 : z(B) ≥ 1}. Otherwise solve the
/// column form min Σ f(S)x(S) s.t. Σ_S |S ∩ B| x(S) ≥ 1 by exact simplex.
pub fn lp_exact_oracle(f: &SubmodularOracle, c: &Clutter) -> Result<Rational> {
    if f.ground() != c.ground() {
        return Err(Error::DomainMismatch("oracle and clutter on different ground sets".into()));
    }
    let n = f.n();
    if c.is_empty() {
        return Ok(Rational::zero());
    }
    let singles: Vec<Rational> = (0..n).map(|v| f.value(Subset::singleton(v))).collect();
    let modular = n <= EXACT_MODULAR_CAP
        && f.value(Subset::EMPTY).is_zero()
        && all_subsets(n).all(|s| f.value(s) == s.iter().fold(Rational::zero(), |a, v| a + &singles[v]));
    if modular {
        return vertex_enumeration(&singles, c);
    }
    cap_check("ground set size for the exact LP", n as u64, EXACT_GENERAL_CAP as u64)?;
    let cols: Vec<Subset> = all_subsets(n).skip(1).collect();
    let cost: Vec<Rational> = cols.iter().map(|&s| f.value(s)).collect();
    let rows: Vec<(Vec<Rational>, Rational)> = c
        .members()
        .iter()
        .map(|&b| (cols.iter().map(|s| Rational::from_integer(s.intersection(b).len().into())).collect(), Rational::one()))
        .collect();
    minimize_covering(&cost, &rows)?
        .map(|o| o.value)
        .ok_or_else(|| Error::Infeasible("covering LP has no feasible point".into()))
}

fn vertex_enumeration(w: &[Rational], c: &Clutter) -> Result<Rational> {
    let n = w.len();
    // Rows: blocker members (≥ 1), then coordinates (≥ 0).
    let mut rows: Vec<(Vec<Rational>, Rational)> = c
        .members()
        .iter()
        .map(|&b| ((0..n).map(|v| if b.contains(v) { Rational::one() } else { Rational::zero() }).collect(), Rational::one()))
        .collect();
    for v in 0..n {
        rows.push(((0..n).map(|u| if u == v { Rational::one() } else { Rational::zero() }).collect(), Rational::zero()));
    }
    let m = rows.len();
    cap_check("active-constraint subsets", binomial(m, n), 2_000_000)?;
    let mut best: Option<Rational> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<Rational>> = pick.iter().map(|&r| rows[r].0.clone()).collect();
        let b: Vec<Rational> = pick.iter().map(|&r| rows[r].1.clone()).collect();
        if let Some(z) = solve_square(&a, &b) {
            let feasible = rows.iter().all(|(row, rhs)| {
                row.iter().zip(&z).fold(Rational::zero(), |acc, (x, y)| acc + x * y) >= *rhs
            });
            if feasible {
                let val = w.iter().zip(&z).fold(Rational::zero(), |acc, (x, y)| acc + x * y);
                if best.as_ref().is_none_or(|b| &val < b) {
                    best = Some(val);
                }
            }
        }
        // Next combination in lexicographic order.
        let Some(i) = (0..n).rev().find(|&i| pick[i] < m - n + i) else { break };
        pick[i] += 1;
        for j in i + 1..n {
            pick[j] = pick[j - 1] + 1;
        }
    }
    best.ok_or_else(|| Error::Infeasible("covering LP has no vertex".into()))
}

fn binomial(m: usize, r: usize) -> u64 {
    (0..r).fold(1u64, |acc, i| acc.saturating_mul((m - i) as u64) / (i as u64 + 1))
}
