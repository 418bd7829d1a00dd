//! Algorithm dispatch and independent re-verification of every result.

use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use submod_core::blockers::BlockingFamily;
use submod_core::brute::{brute_max_ma, brute_min_ma, brute_min_mv, brute_msca, brute_robust_max};
use submod_core::lifting::{lift_oracle, AgentFamily, BaseFamily, LiftedGroundSet};
use submod_core::matroids::{make_free, IndependenceSystem};
use submod_core::maximize::{double_greedy, greedy_max, ma_maximize_traced, robust_maximize, robust_value, ExhaustiveRobust};
use submod_core::minimize::{
    bounded_blocker_round, fracture_expand_return, lp_exact_oracle, ma_bounded_blocker_round, msca_bmatching,
    msca_greedy, mv_reduce_k_alpha, solve_ma_lp, solve_sa_lp, ExactSaSolver, LpRoundingSolver, SaSolver, StageRecord,
    ThresholdRounder,
};
use submod_core::oracles::{is_nonnegative, validate_monotone, validate_multimonotone, SubmodularOracle};
use submod_core::rational::{harmonic, to_f64};
use submod_core::sfm::{lovasz, sfm_brute, sfm_min_norm, sfm_mv_ring};
use submod_core::subset::all_subsets;
use submod_core::{Error as CoreError, Rational, SetTuple, Subset};

use crate::error::{CliError, CliResult};
use crate::instance::{Constraint, Problem, TaskSpec};
use crate::q::Q;

pub const ALGORITHMS: &[&str] = &[
    "bb-round",
    "ma-bb-round",
    "fer",
    "mv-k-alpha",
    "msca-greedy",
    "msca-bmatching",
    "sfm",
    "ring-min",
    "greedy",
    "ma-greedy",
    "double-greedy",
    "robust-exhaustive",
    "lp",
];

/// Largest lifted size k·n for which monotonicity is checked exhaustively.
const VALIDATE_CAP: usize = 16;
/// Relative slack on floating-point bound comparisons.
const BOUND_TOL: f64 = 1e-9;
/// Agreement required between the LP value and the exact column LP.
const LP_EXACT_TOL: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub tau: Option<usize>,
    /// Largest brute-force search space evaluated without `force_brute`.
    pub brute_cap: u64,
    pub force_brute: bool,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: None, tau: None, brute_cap: 1 << 20, force_brute: false, timing: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Verdict {
    fn new(check: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Verdict { check: check.into(), holds, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_value: Option<Q>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stage_factors: Vec<StageRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brute_opt: Option<Q>,
    /// The guarantee this run is checked against, or why none applies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guarantee: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub instance: String,
    pub digest: String,
    pub algorithm: String,
    pub task: String,
    pub seed: u64,
    /// Labels per agent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<Q>,
    pub bounds: Bounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub verdicts: Vec<Verdict>,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl ReportRecord {
    pub fn violations(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.holds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Ref {
    Lp,
    Opt,
}

enum Claim {
    AtMost { label: String, factor: f64, of: Ref },
    AtLeast { label: String, factor: f64, of: Ref },
    EqualsOpt,
    LpBelowOpt,
    LpMatchesExact { f: SubmodularOracle, p: BlockingFamily },
    Checked(Verdict),
}

/// Which exhaustive optimum the claims refer to.
enum Opt {
    None,
    MinCover,
    Msca { caps: Option<Vec<usize>> },
    MaxPack,
    Robust(usize),
    Ring,
    Unconstrained(SubmodularOracle),
}

enum Feas {
    Cover,
    Regions { caps: Option<Vec<usize>> },
    Pack,
    Ring,
    Anything,
}

struct LpEvidence {
    oracles: Vec<SubmodularOracle>,
    family: BlockingFamily,
    z: Vec<Vec<Rational>>,
    claimed: Rational,
}

struct Evidence {
    tuple: Option<SetTuple>,
    claimed: Option<Rational>,
    robust_tau: Option<usize>,
    lp: Option<LpEvidence>,
    stages: Vec<StageRecord>,
    guarantee: Option<String>,
    claims: Vec<Claim>,
    opt: Opt,
    feas: Feas,
}

impl Evidence {
    fn new(feas: Feas, opt: Opt) -> Self {
        Evidence {
            tuple: None,
            claimed: None,
            robust_tau: None,
            lp: None,
            stages: vec![],
            guarantee: None,
            claims: vec![],
            opt,
            feas,
        }
    }
}

/// Whether the objective is monotone with value 0 at the empty tuple, or why that is unknown.
fn monotone_normalized(p: &Problem) -> Result<bool, String> {
    if let Some(fs) = &p.agents {
        for f in fs {
            let mono = validate_monotone(f, 20).map_err(|e| e.to_string())?;
            if mono.is_some() || !f.value(Subset::EMPTY).is_zero() {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let mono = validate_multimonotone(&p.objective, VALIDATE_CAP).map_err(|e| e.to_string())?;
    Ok(mono.is_none() && p.objective.value(&SetTuple::empty(p.k)).is_zero())
}

fn gate(p: &Problem, ev: &mut Evidence, describe: &str, claims: Vec<Claim>) {
    match monotone_normalized(p) {
        Ok(true) => {
            ev.guarantee = Some(describe.to_string());
            ev.claims.extend(claims);
        }
        Ok(false) => ev.guarantee = Some(format!("none: objective is not monotone and normalized ({describe} needs it)")),
        Err(e) => ev.guarantee = Some(format!("none: monotonicity not validated ({e})")),
    }
}

/// The single-agent set function for k = 1.
fn single(p: &Problem) -> SubmodularOracle {
    if let Some(fs) = &p.agents {
        return fs[0].clone();
    }
    let g = p.objective.clone();
    SubmodularOracle::new(p.ground.clone(), g.name().to_string(), g.flags(), move |s| g.value(&SetTuple::new(vec![s])))
}

fn compat(p: &Problem, algorithm: &str) -> Result<(), String> {
    let need = |ok: bool, why: &str| if ok { Ok(()) } else { Err(why.to_string()) };
    let cover = p.covering();
    let min = p.task == TaskSpec::Min;
    let beta = cover.and_then(|c| c.beta()).is_some_and(|b| b > 0);
    match algorithm {
        "bb-round" => {
            need(min && cover.is_some(), "needs a covering constraint and task min")?;
            need(p.k == 1, "needs a single agent")?;
            need(beta, "needs a blocker size bound β")
        }
        "ma-bb-round" | "fer" => {
            need(min && cover.is_some(), "needs a covering constraint and task min")?;
            need(p.agents.is_some(), "needs a per-agent objective")?;
            need(beta, "needs a blocker size bound β")
        }
        "mv-k-alpha" => need(min && cover.is_some(), "needs a covering constraint and task min"),
        "msca-greedy" => {
            need(matches!(p.constraint, Constraint::Regions { .. }), "needs a regions constraint")?;
            need(p.agents.is_some(), "needs a per-agent objective")
        }
        "msca-bmatching" => {
            need(matches!(p.constraint, Constraint::Regions { .. }), "needs a regions constraint")?;
            need(p.agents.is_some(), "needs a per-agent objective")
        }
        "sfm" => {
            let free = cover.and_then(|c| c.explicit()).is_some_and(|c| c.is_empty());
            need(min && free, "needs a free constraint and task min")?;
            need(p.k == 1, "needs a single agent")
        }
        "ring-min" => need(matches!(p.constraint, Constraint::Ring(_)), "needs a ring constraint"),
        "greedy" => {
            need(p.task == TaskSpec::Max, "needs task max")?;
            need(p.k == 1 && p.agents_free(), "needs a single unconstrained agent")?;
            need(
                matches!(p.packing(), Some(BaseFamily::Free(_) | BaseFamily::Matroid(_) | BaseFamily::Intersection(_))),
                "needs a free, matroid or intersection constraint",
            )
        }
        "ma-greedy" => need(p.task == TaskSpec::Max && p.packing().is_some(), "needs a packing constraint and task max"),
        "double-greedy" => {
            need(p.task == TaskSpec::Max, "needs task max")?;
            need(p.k == 1 && p.agents_free(), "needs a single unconstrained agent")?;
            need(matches!(p.packing(), Some(BaseFamily::Free(_))), "needs a free constraint")
        }
        "robust-exhaustive" => need(matches!(p.task, TaskSpec::Robust { .. }), "needs task robust"),
        "lp" => need(
            matches!(p.task, TaskSpec::Min | TaskSpec::LpOnly) && cover.is_some(),
            "needs a covering constraint and task min or lp-only",
        ),
        other => Err(format!("unknown algorithm {other}")),
    }
    .and_then(|()| {
        if p.task == TaskSpec::LpOnly && algorithm != "lp" {
            Err("task lp-only admits only the LP".to_string())
        } else {
            Ok(())
        }
    })
}

/// Algorithms that can run on this problem, in `ALGORITHMS` order.
pub fn compatible_algorithms(p: &Problem) -> Vec<String> {
    ALGORITHMS.iter().filter(|a| compat(p, a).is_ok()).map(|a| a.to_string()).collect()
}

/// The first compatible algorithm, preferring solvers over the bare LP.
pub fn default_algorithm(p: &Problem) -> Option<String> {
    let all = compatible_algorithms(p);
    all.iter().find(|a| *a != "lp").or(all.first()).cloned()
}

fn check_algorithm(p: &Problem, algorithm: &str) -> CliResult<()> {
    if !ALGORITHMS.contains(&algorithm) {
        return Err(CliError::UnknownAlgorithm(algorithm.to_string()));
    }
    compat(p, algorithm).map_err(|reason| CliError::Incompatible {
        algorithm: algorithm.to_string(),
        reason,
        valid: compatible_algorithms(p),
    })
}

fn solve(p: &Problem, algorithm: &str, opts: &RunOptions) -> CliResult<Evidence> {
    let n = p.n();
    let k = p.k;
    let mut ev;
    match algorithm {
        "bb-round" => {
            let fam = p.covering().expect("checked");
            let f = single(p);
            let beta = fam.beta().expect("checked");
            let lp = solve_sa_lp(&f, fam)?;
            let q = bounded_blocker_round(&lp, fam)?;
            ev = Evidence::new(Feas::Cover, Opt::MinCover);
            ev.claimed = Some(f.value(q));
            ev.tuple = Some(SetTuple::new(vec![q]));
            ev.lp = Some(LpEvidence { oracles: vec![f], family: fam.clone(), z: lp.z.clone(), claimed: lp.objective });
            let b = beta as f64;
            gate(p, &mut ev, &format!("cost ≤ β·LP and ≤ β·OPT with β = {beta}"), vec![
                Claim::AtMost { label: format!("cost ≤ {beta}·LP"), factor: b, of: Ref::Lp },
                Claim::AtMost { label: format!("cost ≤ {beta}·OPT"), factor: b, of: Ref::Opt },
            ]);
        }
        "ma-bb-round" => {
            let fam = p.covering().expect("checked");
            let fs = p.agents.as_ref().expect("checked");
            let beta = fam.beta().expect("checked");
            let lp = solve_ma_lp(fs, fam)?;
            let sol = ma_bounded_blocker_round(&lp, fam, fs)?;
            ev = Evidence::new(Feas::Cover, Opt::MinCover);
            ev.claimed = Some(sol.total);
            ev.tuple = Some(sol.tuple);
            ev.lp = Some(LpEvidence { oracles: fs.clone(), family: fam.clone(), z: lp.z.clone(), claimed: lp.objective });
            let factor = beta as f64 * harmonic(n);
            gate(p, &mut ev, &format!("cost ≤ β·H(n)·LP with β = {beta}, n = {n}"), vec![
                Claim::AtMost { label: format!("cost ≤ {factor:.4}·LP"), factor, of: Ref::Lp },
                Claim::AtMost { label: format!("cost ≤ {factor:.4}·OPT"), factor, of: Ref::Opt },
            ]);
        }
        "fer" => {
            let fam = p.covering().expect("checked");
            let fs = p.agents.as_ref().expect("checked");
            let beta = fam.beta().expect("checked") as f64;
            let out = fracture_expand_return(fs, fam, &ThresholdRounder)?;
            ev = Evidence::new(Feas::Cover, Opt::MinCover);
            ev.claimed = Some(out.solution.total);
            ev.tuple = Some(out.solution.tuple);
            ev.lp = Some(LpEvidence {
                oracles: fs.clone(),
                family: fam.clone(),
                z: out.lp.z.clone(),
                claimed: out.lp.objective.clone(),
            });
            let product = out.trace.measured_product;
            let limit = 4.0 * (2.0 * n as f64).log2().ceil() * harmonic(n) * beta;
            ev.stages = out.trace.stages;
            gate(p, &mut ev, &format!("cost ≤ (stage product)·LP, product ≤ 4·⌈log₂2n⌉·H(n)·β = {limit:.4}"), vec![
                Claim::AtMost { label: format!("cost ≤ {product:.4}·LP"), factor: product, of: Ref::Lp },
                Claim::Checked(Verdict::new(
                    "stage product within bound",
                    product <= limit * (1.0 + BOUND_TOL),
                    format!("{product:.6} ≤ {limit:.6}"),
                )),
            ]);
        }
        "mv-k-alpha" => {
            let fam = p.covering().expect("checked");
            let solver: &dyn SaSolver = if fam.beta().is_some_and(|b| b > 0) { &LpRoundingSolver } else { &ExactSaSolver };
            let alpha = solver.alpha(fam).expect("both solvers know α");
            let out = mv_reduce_k_alpha(&p.objective, fam, solver)?;
            ev = Evidence::new(Feas::Cover, Opt::MinCover);
            ev.claimed = Some(out.solution.total);
            ev.tuple = Some(out.solution.tuple);
            let lifted_f = lift_oracle(&p.objective)?;
            let lifted_p = submod_core::blockers::lift_separation(fam, k)?;
            ev.lp = Some(LpEvidence {
                oracles: vec![lifted_f],
                family: lifted_p,
                z: out.lifted_lp.z.clone(),
                claimed: out.lifted_lp.objective.clone(),
            });
            let factor = k as f64 * alpha;
            gate(p, &mut ev, &format!("cost ≤ k·α·OPT with k = {k}, α = {alpha} ({})", solver.name()), vec![
                Claim::AtMost { label: format!("cost ≤ {factor}·OPT"), factor, of: Ref::Opt },
            ]);
        }
        "msca-greedy" => {
            let Constraint::Regions { regions, .. } = &p.constraint else { unreachable!() };
            let fs = p.agents.as_ref().expect("checked");
            let out = msca_greedy(fs, regions)?;
            ev = Evidence::new(Feas::Regions { caps: None }, Opt::Msca { caps: None });
            ev.claimed = Some(out.solution.total);
            ev.tuple = Some(out.solution.tuple);
            let h = out.guarantee;
            gate(p, &mut ev, &format!("cost ≤ H(max |V_i|)·OPT = {h:.4}·OPT"), vec![Claim::AtMost {
                label: format!("cost ≤ {h:.4}·OPT"),
                factor: h,
                of: Ref::Opt,
            }]);
        }
        "msca-bmatching" => {
            let Constraint::Regions { regions, caps } = &p.constraint else { unreachable!() };
            let fs = p.agents.as_ref().expect("checked");
            let caps = caps.clone().unwrap_or_else(|| regions.iter().map(|r| r.len()).collect());
            let sol = msca_bmatching(fs, regions, &caps)?;
            ev = Evidence::new(Feas::Regions { caps: Some(caps.clone()) }, Opt::Msca { caps: Some(caps.clone()) });
            ev.claimed = Some(sol.total);
            ev.tuple = Some(sol.tuple);
            let bmax = caps.iter().copied().max().unwrap_or(1);
            if bmax <= 1 {
                ev.guarantee = Some("exact: every b_i = 1".into());
                ev.claims.push(Claim::EqualsOpt);
            } else {
                let f = bmax as f64;
                gate(p, &mut ev, &format!("cost ≤ max b_i·OPT = {bmax}·OPT"), vec![Claim::AtMost {
                    label: format!("cost ≤ {bmax}·OPT"),
                    factor: f,
                    of: Ref::Opt,
                }]);
            }
        }
        "sfm" => {
            let f = single(p);
            let (s, v) = sfm_min_norm(&f)?;
            ev = Evidence::new(Feas::Anything, Opt::Unconstrained(f));
            ev.claimed = Some(v);
            ev.tuple = Some(SetTuple::new(vec![s]));
            ev.guarantee = Some("exact".into());
            ev.claims.push(Claim::EqualsOpt);
        }
        "ring-min" => {
            let Constraint::Ring(ring) = &p.constraint else { unreachable!() };
            let (t, v) = sfm_mv_ring(&p.objective, ring)?;
            ev = Evidence::new(Feas::Ring, Opt::Ring);
            ev.claimed = Some(v);
            ev.tuple = Some(t);
            ev.guarantee = Some("exact".into());
            ev.claims.push(Claim::EqualsOpt);
        }
        "greedy" => {
            let f = single(p);
            let sys: IndependenceSystem = match p.packing().expect("checked") {
                BaseFamily::Free(g) => make_free(g.clone()).into(),
                BaseFamily::Matroid(m) => m.clone().into(),
                BaseFamily::Intersection(mi) => mi.clone().into(),
                _ => unreachable!(),
            };
            let q = sys.p();
            let trace = greedy_max(&f, &sys)?;
            ev = Evidence::new(Feas::Pack, Opt::MaxPack);
            ev.claimed = Some(trace.value);
            ev.tuple = Some(SetTuple::new(vec![trace.set]));
            let factor = 1.0 / (q as f64 + 1.0);
            gate(p, &mut ev, &format!("value ≥ OPT/{}", q + 1), vec![Claim::AtLeast {
                label: format!("value ≥ OPT/{}", q + 1),
                factor,
                of: Ref::Opt,
            }]);
        }
        "ma-greedy" => {
            let f = p.packing().expect("checked");
            let (sol, _trace, lifted_p) = ma_maximize_traced(&p.objective, f, &p.agent_families)?;
            ev = Evidence::new(Feas::Pack, Opt::MaxPack);
            ev.claimed = Some(sol.total);
            ev.tuple = Some(sol.tuple);
            // The lifted family is itself a matroid when F is and every F_i is free.
            let single_matroid = p.agents_free()
                && matches!(f, BaseFamily::Free(_) | BaseFamily::Whole(_) | BaseFamily::Matroid(_));
            let denom = if single_matroid { 2 } else { lifted_p + 1 };
            gate(p, &mut ev, &format!("value ≥ OPT/{denom}"), vec![Claim::AtLeast {
                label: format!("value ≥ OPT/{denom}"),
                factor: 1.0 / denom as f64,
                of: Ref::Opt,
            }]);
        }
        "double-greedy" => {
            let f = single(p);
            let s = double_greedy(&f);
            ev = Evidence::new(Feas::Pack, Opt::MaxPack);
            ev.claimed = Some(f.value(s));
            ev.tuple = Some(SetTuple::new(vec![s]));
            match is_nonnegative(&f, 20) {
                Ok(true) => {
                    ev.guarantee = Some("value ≥ OPT/3".into());
                    ev.claims.push(Claim::AtLeast { label: "value ≥ OPT/3".into(), factor: 1.0 / 3.0, of: Ref::Opt });
                }
                Ok(false) => ev.guarantee = Some("none: objective takes negative values".into()),
                Err(e) => ev.guarantee = Some(format!("none: nonnegativity not validated ({e})")),
            }
        }
        "robust-exhaustive" => {
            let TaskSpec::Robust { tau } = p.task else { unreachable!() };
            let tau = opts.tau.unwrap_or(tau);
            let f = p.packing().expect("checked");
            let (sol, robust) = robust_maximize(&p.objective, f, &p.agent_families, tau, &ExhaustiveRobust::default())?;
            ev = Evidence::new(Feas::Pack, Opt::Robust(tau));
            ev.claimed = Some(robust);
            ev.robust_tau = Some(tau);
            ev.tuple = Some(sol.tuple);
            ev.guarantee = Some(format!("exact robust optimum at τ = {tau}"));
            ev.claims.push(Claim::EqualsOpt);
        }
        "lp" => {
            let fam = p.covering().expect("checked");
            let opt = if p.task == TaskSpec::Min { Opt::MinCover } else { Opt::None };
            ev = Evidence::new(Feas::Anything, opt);
            let (oracles, family, lp) = match &p.agents {
                Some(fs) => (fs.clone(), fam.clone(), solve_ma_lp(fs, fam)?),
                None => {
                    let f = lift_oracle(&p.objective)?;
                    let lp_fam = submod_core::blockers::lift_separation(fam, k)?;
                    let lp = solve_sa_lp(&f, &lp_fam)?;
                    (vec![f], lp_fam, lp)
                }
            };
            if k == 1 {
                if let Some(f) = oracles.first() {
                    ev.claims.push(Claim::LpMatchesExact { f: f.clone(), p: family.clone() });
                }
            }
            ev.lp = Some(LpEvidence { oracles, family, z: lp.z.clone(), claimed: lp.objective });
            // For non-monotone f the relaxation does not bound min over F↑ from below.
            gate(p, &mut ev, "LP ≤ OPT", vec![Claim::LpBelowOpt]);
        }
        other => return Err(CliError::UnknownAlgorithm(other.to_string())),
    }
    Ok(ev)
}

fn space(n: usize, k: usize) -> u64 {
    (k as u64 + 1).checked_pow(n as u32).unwrap_or(u64::MAX)
}

fn opt_space(p: &Problem, opt: &Opt) -> u64 {
    match opt {
        Opt::None => 0,
        Opt::Ring => 1u64.checked_shl((p.k * p.n()) as u32).unwrap_or(u64::MAX),
        Opt::Unconstrained(f) => 1u64 << f.n(),
        _ => space(p.n(), p.k),
    }
}

/// Minimum of g over ring members, scanning every lifted subset.
fn ring_scan(p: &Problem) -> CliResult<Rational> {
    let Constraint::Ring(ring) = &p.constraint else { unreachable!() };
    let lifted = LiftedGroundSet::new(p.ground.clone(), p.k)?;
    all_subsets(p.k * p.n())
        .filter(|&s| ring.contains(s))
        .map(|s| p.objective.value(&lifted.unlift(s)))
        .min()
        .ok_or_else(|| CliError::Core(CoreError::Infeasible("ring family is empty".into())))
}

fn brute(p: &Problem, opt: &Opt) -> CliResult<Option<Rational>> {
    let v = match opt {
        Opt::None => return Ok(None),
        Opt::MinCover => {
            let fam = p.covering().expect("covering");
            match &p.agents {
                Some(fs) => brute_min_ma(fs, fam)?.1,
                None => brute_min_mv(&p.objective, fam)?.1,
            }
        }
        Opt::Msca { caps } => {
            let Constraint::Regions { regions, .. } = &p.constraint else { unreachable!() };
            brute_msca(p.agents.as_ref().expect("agents"), regions, caps.as_deref())?.1
        }
        Opt::MaxPack => brute_max_ma(&p.objective, p.packing().expect("packing"), &p.agent_families)?.1,
        Opt::Robust(tau) => brute_robust_max(&p.objective, p.packing().expect("packing"), &p.agent_families, *tau)?.1,
        Opt::Ring => ring_scan(p)?,
        Opt::Unconstrained(f) => sfm_brute(f)?.1,
    };
    Ok(Some(v))
}

fn feasible(p: &Problem, feas: &Feas, t: &SetTuple) -> Verdict {
    let name = "feasible";
    if t.k() != p.k || t.parts().iter().any(|s| !s.fits(p.n())) {
        return Verdict::new(name, false, "wrong shape");
    }
    let res: Result<(), String> = match feas {
        Feas::Anything => Ok(()),
        Feas::Cover => {
            let fam = p.covering().expect("covering");
            if !t.is_disjoint() {
                Err("components overlap".into())
            } else if !fam.contains(t.union()) {
                Err(format!("union {} misses a blocker member", p.ground.format_subset(t.union())))
            } else {
                Ok(())
            }
        }
        Feas::Regions { caps } => {
            let Constraint::Regions { regions, .. } = &p.constraint else { unreachable!() };
            if !t.is_disjoint() || t.union() != p.ground.full() {
                Err("not a partition of V".into())
            } else if let Some(i) = (0..p.k).find(|&i| !t.part(i).is_subset_of(regions[i])) {
                Err(format!("agent {i} leaves its region"))
            } else if let Some(i) = caps.as_ref().and_then(|c| (0..p.k).find(|&i| t.part(i).len() > c[i])) {
                Err(format!("agent {i} exceeds its cap"))
            } else {
                Ok(())
            }
        }
        Feas::Pack => {
            let f = p.packing().expect("packing");
            if !t.is_disjoint() {
                Err("components overlap".into())
            } else if !f.contains(t.union()) {
                Err("union not in F".into())
            } else if let Some(i) = p.agent_families.iter().zip(t.parts()).position(|(fi, &s): (&AgentFamily, _)| !fi.contains(s)) {
                Err(format!("agent {i} violates F_{i}"))
            } else {
                Ok(())
            }
        }
        Feas::Ring => {
            let Constraint::Ring(ring) = &p.constraint else { unreachable!() };
            match LiftedGroundSet::new(p.ground.clone(), p.k).and_then(|l| l.lift(t)) {
                Ok(s) if ring.contains(s) => Ok(()),
                Ok(_) => Err("tuple outside the ring".into()),
                Err(e) => Err(e.to_string()),
            }
        }
    };
    match res {
        Ok(()) => Verdict::new(name, true, ""),
        Err(d) => Verdict::new(name, false, d),
    }
}

/// Recomputes the LP value from its points and checks the combined point against the family.
fn check_lp(lp: &LpEvidence, verdicts: &mut Vec<Verdict>) -> CliResult<Rational> {
    let mut value = Rational::zero();
    for (f, z) in lp.oracles.iter().zip(&lp.z) {
        value += lovasz(f, z)?.value;
    }
    verdicts.push(Verdict::new(
        "lp objective recomputed",
        value == lp.claimed,
        if value == lp.claimed { String::new() } else { format!("claimed {}, recomputed {}", Q(lp.claimed.clone()), Q(value.clone())) },
    ));
    let m = lp.family.n();
    let combined: Vec<Rational> =
        (0..m).map(|v| lp.z.iter().fold(Rational::zero(), |acc, z| acc + &z[v])).collect();
    let cut = lp.family.separate(&combined)?;
    verdicts.push(Verdict::new(
        "lp point covers every blocker",
        cut.is_none(),
        cut.map(|b| format!("mass below 1 on {}", lp.family.ground().format_subset(b))).unwrap_or_default(),
    ));
    Ok(value)
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + BOUND_TOL * rhs.abs().max(1.0)
}

/// Runs `algorithm`, then re-derives feasibility, objective, LP value, and bounds from the problem alone.
pub fn run(p: &Problem, algorithm: &str, opts: &RunOptions) -> CliResult<ReportRecord> {
    check_algorithm(p, algorithm)?;
    let start = Instant::now();
    let ev = solve(p, algorithm, opts)?;
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let mut verdicts = Vec::new();

    let objective = match &ev.tuple {
        Some(t) => {
            let recomputed = match ev.robust_tau {
                Some(tau) => robust_value(&p.objective, t, tau)?,
                None => p.objective.value(t),
            };
            if let Some(c) = &ev.claimed {
                let same = c == &recomputed;
                let detail = if same { String::new() } else { format!("solver said {}, recomputed {}", Q(c.clone()), Q(recomputed.clone())) };
                verdicts.push(Verdict::new("objective recomputed", same, detail));
            }
            verdicts.push(feasible(p, &ev.feas, t));
            Some(recomputed)
        }
        None => None,
    };
    let lp_value = match &ev.lp {
        Some(lp) => Some(check_lp(lp, &mut verdicts)?),
        None => None,
    };
    let brute_opt = if opts.force_brute || opt_space(p, &ev.opt) <= opts.brute_cap { brute(p, &ev.opt)? } else { None };

    for claim in &ev.claims {
        let reference = |of: Ref| match of {
            Ref::Lp => lp_value.as_ref(),
            Ref::Opt => brute_opt.as_ref(),
        };
        match claim {
            Claim::AtMost { label, factor, of } => {
                if let (Some(obj), Some(r)) = (&objective, reference(*of)) {
                    let (lhs, rhs) = (to_f64(obj), factor * to_f64(r));
                    verdicts.push(Verdict::new(label.clone(), within(lhs, rhs), format!("{lhs:.6} vs {rhs:.6}")));
                }
            }
            Claim::AtLeast { label, factor, of } => {
                if let (Some(obj), Some(r)) = (&objective, reference(*of)) {
                    let (lhs, rhs) = (factor * to_f64(r), to_f64(obj));
                    verdicts.push(Verdict::new(label.clone(), within(lhs, rhs), format!("{rhs:.6} vs {lhs:.6}")));
                }
            }
            Claim::EqualsOpt => {
                if let (Some(obj), Some(opt)) = (&objective, &brute_opt) {
                    let detail = if obj == opt { String::new() } else { format!("{} vs optimum {}", Q(obj.clone()), Q(opt.clone())) };
                    verdicts.push(Verdict::new("equals exhaustive optimum", obj == opt, detail));
                }
            }
            Claim::LpBelowOpt => {
                if let (Some(lp), Some(opt)) = (&lp_value, &brute_opt) {
                    verdicts.push(Verdict::new("LP ≤ OPT", lp <= opt, format!("{} vs {}", Q(lp.clone()), Q(opt.clone()))));
                }
            }
            Claim::LpMatchesExact { f, p: fam } => {
                let exact = fam.explicit().map(|c| lp_exact_oracle(f, c));
                if let (Some(Ok(exact)), Some(lp)) = (exact, &lp_value) {
                    let (a, b) = (to_f64(lp), to_f64(&exact));
                    let ok = (a - b).abs() <= LP_EXACT_TOL * b.abs().max(1.0);
                    verdicts.push(Verdict::new("LP matches exact column LP", ok, format!("{a:.8} vs {b:.8}")));
                }
            }
            Claim::Checked(v) => verdicts.push(v.clone()),
        }
    }

    let ratio = match (&objective, &brute_opt) {
        (Some(obj), Some(opt)) if !opt.is_zero() => Some(to_f64(obj) / to_f64(opt)),
        (Some(obj), Some(_)) if obj.is_zero() => Some(1.0),
        _ => None,
    };
    let solution = ev.tuple.as_ref().map(|t| {
        t.parts().iter().map(|s| s.iter().map(|v| p.ground.label(v).to_string()).collect()).collect()
    });
    let ok = verdicts.iter().all(|v| v.holds);
    Ok(ReportRecord {
        instance: p.instance.name.clone(),
        digest: p.digest.clone(),
        algorithm: algorithm.to_string(),
        task: p.task.id().to_string(),
        seed: opts.seed.unwrap_or(p.instance.seed),
        solution,
        objective: objective.map(Q),
        bounds: Bounds {
            lp_value: lp_value.map(Q),
            stage_factors: ev.stages,
            brute_opt: brute_opt.map(Q),
            guarantee: ev.guarantee,
        },
        ratio,
        verdicts,
        ok,
        wall_ms: opts.timing.then_some(elapsed),
    })
}

/// Re-checks a stored report against its instance: shape, feasibility, and objective.
pub fn verify_record(p: &Problem, record: &ReportRecord) -> CliResult<Vec<Verdict>> {
    let mut out = vec![Verdict::new("digest matches", record.digest == p.digest, "")];
    let Some(sol) = &record.solution else {
        return Ok(out);
    };
    let mut parts = Vec::new();
    for (i, labels) in sol.iter().enumerate() {
        let mut s = Subset::EMPTY;
        for l in labels {
            match p.ground.index_of(l) {
                Some(v) => s = s.with(v),
                None => {
                    out.push(Verdict::new("labels known", false, format!("agent {i}: unknown label {l:?}")));
                    return Ok(out);
                }
            }
        }
        parts.push(s);
    }
    let t = SetTuple::new(parts);
    let feas = match (record.algorithm.as_str(), &p.constraint) {
        ("lp" | "sfm", _) => Feas::Anything,
        ("msca-bmatching", Constraint::Regions { regions, caps }) => {
            Feas::Regions { caps: Some(caps.clone().unwrap_or_else(|| regions.iter().map(|r| r.len()).collect())) }
        }
        (_, Constraint::Regions { .. }) => Feas::Regions { caps: None },
        (_, Constraint::Covering(_)) => Feas::Cover,
        (_, Constraint::Packing(_)) => Feas::Pack,
        (_, Constraint::Ring(_)) => Feas::Ring,
    };
    out.push(feasible(p, &feas, &t));
    let value = match p.task {
        TaskSpec::Robust { tau } if record.algorithm == "robust-exhaustive" => robust_value(&p.objective, &t, tau)?,
        _ => p.objective.value(&t),
    };
    let claimed = record.objective.as_ref().map(|q| &q.0);
    out.push(Verdict::new(
        "objective recomputed",
        claimed == Some(&value),
        format!("recorded {}, recomputed {}", claimed.map(|c| Q(c.clone()).to_string()).unwrap_or_default(), Q(value.clone())),
    ));
    if let (Some(r), Some(opt)) = (record.ratio, &record.bounds.brute_opt) {
        let expect = if opt.0.is_zero() { 1.0 } else { to_f64(&value) / opt.to_f64() };
        out.push(Verdict::new("ratio recomputed", (r - expect).abs() <= 1e-12 * expect.abs().max(1.0), ""));
    }
    Ok(out)
}
