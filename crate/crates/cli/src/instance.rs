//! Line-delimited JSON instance files and their construction into oracles and families.

use serde::{Deserialize, Serialize};

use sha2::{Digest, Sha256};
use submod_core::blockers::BlockingFamily;
use submod_core::graph::Graph;
use submod_core::lifting::{unlift_oracle, AgentFamily, BaseFamily, LiftedGroundSet};
use submod_core::matroids::{
    make_free, make_graphic, make_laminar, make_partition, make_uniform, Matroid, MatroidIntersection,
};
use submod_core::oracles::{
    make_concave_of_cardinality, make_coverage, make_cut_function, make_decomposable, make_goel_allocation,
    make_modular, make_quadratic, make_weighted_matroid_rank, Flags, MultivariateOracle, SubmodularOracle,
};
use submod_core::sfm::RingFamily;
use submod_core::{Error as CoreError, GroundSet, Rational, Subset};

use crate::error::{CliError, CliResult};
use crate::q::{unwrap_all, Q};
use crate::tagged::{join_path, split_path, tagged_enum};

pub const FORMAT_VERSION: &str = "submod-instance/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    pub name: String,
    /// Labels of V, in index order.
    pub ground: Vec<String>,
    pub objective: ObjectiveSpec,
    pub constraint: ConstraintSpec,
    /// Per-agent families F_i; omitted means every F_i = 2^V.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub agent_constraints: Vec<AgentSpec>,
    pub task: TaskSpec,
    #[serde(default)]
    pub seed: u64,
}

tagged_enum! {
    /// A set function on V (or on the lifted ground set inside `lifted`).
    #[derive(Clone, Debug, PartialEq)]
    pub enum SetFnSpec {
        Modular = "modular" {
            weights: Vec<Q>,
        },
        /// Element v covers the universe items `covers[v]`.
        Coverage = "coverage" {
            covers: Vec<Vec<usize>>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            item_weights: Option<Vec<Q>>,
        },
        ConcaveOfCardinality = "concave-of-cardinality" {
            table: Vec<Q>,
        },
        WeightedMatroidRank = "weighted-matroid-rank" {
            matroid: MatroidSpec,
            weights: Vec<Q>,
        },
        /// Cut function of a graph whose vertices are the ground set.
        Cut = "cut" {
            edges: Vec<(usize, usize)>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            weights: Option<Vec<Q>>,
        },
        /// The three-task contractor example; needs |V| = 3.
        GoelAllocation = "goel-allocation",
        /// Values of all 2^n subsets, indexed by bitmask.
        Table = "table" {
            values: Vec<Q>,
        },
        Sum = "sum" {
            parts: Vec<SetFnSpec>,
        },
    }
}

tagged_enum! {
    #[derive(Clone, Debug, PartialEq)]
    pub enum ObjectiveSpec {
        /// Σ_i f_i(S_i).
        Agents = "agents" { agents: Vec<SetFnSpec> },
        /// zᵀAz with z_i = Σ_{v∈S_i} w(v).
        Quadratic = "quadratic" {
            matrix: Vec<Vec<Q>>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            weights: Option<Vec<Q>>,
        },
        /// A set function on [k]×V, element (i, v) at index i·n + v.
        Lifted = "lifted" { k: usize, function: SetFnSpec },
        Sum = "sum" { parts: Vec<ObjectiveSpec> },
    }
}

tagged_enum! {
    #[derive(Clone, Debug, PartialEq)]
    pub enum MatroidSpec {
        Free = "free",
        Uniform = "uniform" { rank: usize },
        Partition = "partition" { parts: Vec<Vec<usize>>, caps: Vec<usize> },
        Laminar = "laminar" { family: Vec<Vec<usize>>, caps: Vec<usize> },
        /// Cycle matroid; the ground set is the edge list.
        Graphic = "graphic" { vertices: usize, edges: Vec<(usize, usize)> },
    }
}

tagged_enum! {
    #[derive(Clone, Debug, PartialEq)]
    pub enum ConstraintSpec {
        /// F = {V}.
        Whole = "whole",
        /// F = 2^V.
        Free = "free",
        /// Vertices are the ground set.
        VertexCover = "vertex-cover" { edges: Vec<(usize, usize)> },
        /// Edges are the ground set.
        EdgeCover = "edge-cover" { vertices: usize, edges: Vec<(usize, usize)> },
        HittingSet = "hitting-set" { sets: Vec<Vec<usize>> },
        /// Sets of size at least m.
        Cardinality = "cardinality" { m: usize },
        StPath = "st-path" { vertices: usize, edges: Vec<(usize, usize)>, s: usize, t: usize },
        /// Edge sets leaving every vertex at most τ of its edges removed.
        PrunedNetwork = "pruned-network" { vertices: usize, edges: Vec<(usize, usize)>, tau: usize },
        /// Explicit blocker members.
        Blockers = "blockers" { members: Vec<Vec<usize>> },
        Matroid = "matroid" { matroid: MatroidSpec },
        Intersection = "intersection" { matroids: Vec<MatroidSpec> },
        /// Partition V with S_i ⊆ regions[i] and optionally |S_i| ≤ caps[i].
        Regions = "regions" {
            regions: Vec<Vec<usize>>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            caps: Option<Vec<usize>>,
        },
        /// Ring of tuples on the lifted index space i·n + v.
        Ring = "ring" {
            #[serde(default)]
            implications: Vec<(usize, usize)>,
            #[serde(default)]
            lower: Vec<usize>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            upper: Option<Vec<usize>>,
        },
    }
}

tagged_enum! {
    #[derive(Clone, Debug, PartialEq)]
    pub enum AgentSpec {
        Free = "free",
        Matroid = "matroid" {
            matroid: MatroidSpec,
        },
        Ring = "ring" {
            #[serde(default)]
            implications: Vec<(usize, usize)>,
            #[serde(default)]
            lower: Vec<usize>,
            #[serde(default, skip_serializing_if = "Option::is_none")]
            upper: Option<Vec<usize>>,
        },
    }
}

tagged_enum! {
    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum TaskSpec {
        Min = "min",
        Max = "max",
        Robust = "robust" { tau: usize },
        LpOnly = "lp-only",
    }
}

impl TaskSpec {
    pub fn id(&self) -> &'static str {
        match self {
            TaskSpec::Min => "min",
            TaskSpec::Max => "max",
            TaskSpec::Robust { .. } => "robust",
            TaskSpec::LpOnly => "lp-only",
        }
    }
}

/// The constraint after construction, in the form its task needs.
#[derive(Clone, Debug)]
pub enum Constraint {
    /// Upward-closed F↑ for minimization.
    Covering(BlockingFamily),
    /// Downward or exact F for maximization.
    Packing(BaseFamily),
    Regions { regions: Vec<Subset>, caps: Option<Vec<usize>> },
    /// On the lifted ground set.
    Ring(RingFamily),
}

/// A fully constructed instance.
#[derive(Clone, Debug)]
pub struct Problem {
    pub instance: InstanceFile,
    pub digest: String,
    pub ground: GroundSet,
    pub k: usize,
    pub objective: MultivariateOracle,
    /// Per-agent functions when the objective is a sum of them.
    pub agents: Option<Vec<SubmodularOracle>>,
    pub constraint: Constraint,
    pub agent_families: Vec<AgentFamily>,
    pub task: TaskSpec,
}

impl Problem {
    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn covering(&self) -> Option<&BlockingFamily> {
        match &self.constraint {
            Constraint::Covering(p) => Some(p),
            _ => None,
        }
    }

    pub fn packing(&self) -> Option<&BaseFamily> {
        match &self.constraint {
            Constraint::Packing(f) => Some(f),
            _ => None,
        }
    }

    pub fn agents_free(&self) -> bool {
        self.agent_families.iter().all(|f| f.is_free())
    }
}

/// Hex SHA-256 of the compact serialization.
pub fn digest(instance: &InstanceFile) -> String {
    let text = serde_json::to_string(instance).expect("instances serialize");
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Parses one JSON line; `line` is only used for error positions.
pub fn parse_line(text: &str, line: usize) -> CliResult<InstanceFile> {
    let mut de = serde_json::Deserializer::from_str(text);
    let inst: InstanceFile = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let outer = e.path().to_string();
        let message = e.into_inner().to_string();
        let (inner, rest) = split_path(&message);
        let field = inner.map_or(outer.clone(), |p| join_path(&outer, p));
        CliError::Parse { line, field, message: rest.to_string() }
    })?;
    de.end().map_err(|e| CliError::Parse { line, field: ".".into(), message: e.to_string() })?;
    if inst.version != FORMAT_VERSION {
        return Err(CliError::Parse {
            line,
            field: "version".into(),
            message: format!("unsupported version {:?}, expected {FORMAT_VERSION:?}", inst.version),
        });
    }
    Ok(inst)
}

/// Every non-blank line that does not start with `#`, with its 1-based line number.
pub fn parse_instances(text: &str) -> CliResult<Vec<(usize, InstanceFile)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| parse_line(l, i + 1).map(|inst| (i + 1, inst)))
        .collect()
}

pub fn to_line(instance: &InstanceFile) -> String {
    serde_json::to_string(instance).expect("instances serialize")
}

/// Parses and builds every instance of a file.
pub fn parse_instance(path: &std::path::Path) -> CliResult<Vec<Problem>> {
    let text = std::fs::read_to_string(path)?;
    parse_instances(&text)?.into_iter().map(|(line, inst)| build(inst, line)).collect()
}

struct Ctx {
    line: usize,
}

impl Ctx {
    fn err(&self, field: &str, message: impl Into<String>) -> CliError {
        CliError::Parse { line: self.line, field: field.to_string(), message: message.into() }
    }

    fn core(&self, field: &str, e: CoreError) -> CliError {
        self.err(field, e.to_string())
    }

    fn subset(&self, field: &str, elems: &[usize], n: usize) -> CliResult<Subset> {
        if let Some(&v) = elems.iter().find(|&&v| v >= n) {
            return Err(self.err(field, format!("element {v} outside a ground set of size {n}")));
        }
        Ok(Subset::from_iter(elems.iter().copied()))
    }

    fn subsets(&self, field: &str, sets: &[Vec<usize>], n: usize) -> CliResult<Vec<Subset>> {
        sets.iter().enumerate().map(|(i, s)| self.subset(&format!("{field}[{i}]"), s, n)).collect()
    }

    fn graph(&self, field: &str, vertices: usize, edges: &[(usize, usize)]) -> CliResult<Graph> {
        Graph::new(vertices, edges.to_vec()).map_err(|e| self.core(field, e))
    }

    fn arity(&self, field: &str, expected: usize, got: usize) -> CliResult<()> {
        if expected != got {
            return Err(self.err(field, format!("expected {expected} entries, got {got}")));
        }
        Ok(())
    }
}

fn matroid(ctx: &Ctx, spec: &MatroidSpec, ground: &GroundSet, at: &str) -> CliResult<Matroid> {
    let n = ground.len();
    let m = match spec {
        MatroidSpec::Free => make_free(ground.clone()),
        MatroidSpec::Uniform { rank } => make_uniform(ground.clone(), *rank).map_err(|e| ctx.core(at, e))?,
        MatroidSpec::Partition { parts, caps } => {
            let parts = ctx.subsets(&format!("{at}.parts"), parts, n)?;
            make_partition(ground.clone(), parts, caps.clone()).map_err(|e| ctx.core(at, e))?
        }
        MatroidSpec::Laminar { family, caps } => {
            let family = ctx.subsets(&format!("{at}.family"), family, n)?;
            make_laminar(ground.clone(), family, caps.clone()).map_err(|e| ctx.core(at, e))?
        }
        MatroidSpec::Graphic { vertices, edges } => {
            ctx.arity(&format!("{at}.edges"), n, edges.len())?;
            let g = ctx.graph(&format!("{at}.edges"), *vertices, edges)?;
            make_graphic(g).and_then(|m| m.relabel(ground.clone())).map_err(|e| ctx.core(at, e))?
        }
    };
    Ok(m)
}

fn set_fn(ctx: &Ctx, spec: &SetFnSpec, ground: &GroundSet, at: &str) -> CliResult<SubmodularOracle> {
    let n = ground.len();
    let wrap = |e: CoreError| ctx.core(at, e);
    let f = match spec {
        SetFnSpec::Modular { weights } => {
            ctx.arity(&format!("{at}.weights"), n, weights.len())?;
            make_modular(ground.clone(), unwrap_all(weights)).map_err(wrap)?
        }
        SetFnSpec::Coverage { covers, item_weights } => {
            ctx.arity(&format!("{at}.covers"), n, covers.len())?;
            let covers = ctx.subsets(&format!("{at}.covers"), covers, 64)?;
            make_coverage(ground.clone(), covers, item_weights.as_deref().map(unwrap_all)).map_err(wrap)?
        }
        SetFnSpec::ConcaveOfCardinality { table } => {
            ctx.arity(&format!("{at}.table"), n + 1, table.len())?;
            make_concave_of_cardinality(ground.clone(), unwrap_all(table)).map_err(wrap)?
        }
        SetFnSpec::WeightedMatroidRank { matroid: m, weights } => {
            ctx.arity(&format!("{at}.weights"), n, weights.len())?;
            let m = matroid(ctx, m, ground, &format!("{at}.matroid"))?;
            make_weighted_matroid_rank(m, unwrap_all(weights)).map_err(wrap)?
        }
        SetFnSpec::Cut { edges, weights } => {
            let g = ctx.graph(&format!("{at}.edges"), n, edges)?;
            make_cut_function(&g, weights.as_deref().map(unwrap_all))
                .and_then(|f| f.relabel(ground.clone()))
                .map_err(wrap)?
        }
        SetFnSpec::GoelAllocation => {
            ctx.arity(at, 3, n)?;
            make_goel_allocation().relabel(ground.clone()).map_err(wrap)?
        }
        SetFnSpec::Table { values } => {
            if n > 20 {
                return Err(ctx.err(at, format!("value tables need n ≤ 20, got {n}")));
            }
            ctx.arity(&format!("{at}.values"), 1 << n, values.len())?;
            let table = unwrap_all(values);
            SubmodularOracle::new(ground.clone(), "table", Flags::NONE, move |s| table[s.bits() as usize].clone())
        }
        SetFnSpec::Sum { parts } => {
            if parts.is_empty() {
                return Err(ctx.err(&format!("{at}.parts"), "a sum needs at least one part"));
            }
            let fs = parts
                .iter()
                .enumerate()
                .map(|(i, p)| set_fn(ctx, p, ground, &format!("{at}.parts[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            SubmodularOracle::sum(&fs).map_err(wrap)?
        }
    };
    Ok(f)
}

/// Builds the multivariate objective and, when it is a sum of per-agent terms, the agents.
fn objective(
    ctx: &Ctx,
    spec: &ObjectiveSpec,
    ground: &GroundSet,
    at: &str,
) -> CliResult<(MultivariateOracle, Option<Vec<SubmodularOracle>>)> {
    match spec {
        ObjectiveSpec::Agents { agents } => {
            if agents.is_empty() {
                return Err(ctx.err(&format!("{at}.agents"), "at least one agent is required"));
            }
            let fs = agents
                .iter()
                .enumerate()
                .map(|(i, a)| set_fn(ctx, a, ground, &format!("{at}.agents[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            let g = make_decomposable(fs.clone()).map_err(|e| ctx.core(at, e))?;
            Ok((g, Some(fs)))
        }
        ObjectiveSpec::Quadratic { matrix, weights } => {
            if matrix.is_empty() {
                return Err(ctx.err(&format!("{at}.matrix"), "the matrix needs at least one row"));
            }
            if let Some(w) = weights {
                ctx.arity(&format!("{at}.weights"), ground.len(), w.len())?;
            }
            for (i, row) in matrix.iter().enumerate() {
                ctx.arity(&format!("{at}.matrix[{i}]"), matrix.len(), row.len())?;
            }
            let m: Vec<Vec<Rational>> = matrix.iter().map(|r| unwrap_all(r)).collect();
            let g = make_quadratic(ground.clone(), m, weights.as_deref().map(unwrap_all)).map_err(|e| ctx.core(at, e))?;
            Ok((g, None))
        }
        ObjectiveSpec::Lifted { k, function } => {
            if *k == 0 {
                return Err(ctx.err(&format!("{at}.k"), "k must be positive"));
            }
            let lifted = LiftedGroundSet::new(ground.clone(), *k).map_err(|e| ctx.core(&format!("{at}.k"), e))?;
            let f = set_fn(ctx, function, lifted.ground(), &format!("{at}.function"))?;
            let g = unlift_oracle(&f, ground.clone(), *k).map_err(|e| ctx.core(at, e))?;
            Ok((g, None))
        }
        ObjectiveSpec::Sum { parts } => {
            if parts.is_empty() {
                return Err(ctx.err(&format!("{at}.parts"), "a sum needs at least one part"));
            }
            let built = parts
                .iter()
                .enumerate()
                .map(|(i, p)| objective(ctx, p, ground, &format!("{at}.parts[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            let k = built[0].0.k();
            if let Some(i) = built.iter().position(|(g, _)| g.k() != k) {
                return Err(ctx.err(&format!("{at}.parts[{i}]"), format!("has {} agents, expected {k}", built[i].0.k())));
            }
            let gs: Vec<MultivariateOracle> = built.iter().map(|b| b.0.clone()).collect();
            let g = MultivariateOracle::sum(&gs).map_err(|e| ctx.core(at, e))?;
            let agents = if built.iter().all(|b| b.1.is_some()) {
                let per = (0..k)
                    .map(|i| {
                        let fs: Vec<SubmodularOracle> = built.iter().map(|b| b.1.as_ref().expect("checked")[i].clone()).collect();
                        SubmodularOracle::sum(&fs)
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ctx.core(at, e))?;
                Some(per)
            } else {
                None
            };
            Ok((g, agents))
        }
    }
}

fn edge_family(
    ctx: &Ctx,
    ground: &GroundSet,
    vertices: usize,
    edges: &[(usize, usize)],
    make: impl FnOnce(&Graph) -> Result<BlockingFamily, CoreError>,
) -> CliResult<BlockingFamily> {
    ctx.arity("constraint.edges", ground.len(), edges.len())?;
    let g = ctx.graph("constraint.edges", vertices, edges)?;
    make(&g).and_then(|p| p.relabel(ground.clone())).map_err(|e| ctx.core("constraint", e))
}

fn covering(ctx: &Ctx, spec: &ConstraintSpec, ground: &GroundSet) -> CliResult<Option<BlockingFamily>> {
    let n = ground.len();
    let at = "constraint";
    let p = match spec {
        ConstraintSpec::Whole => BlockingFamily::whole(ground.clone()),
        ConstraintSpec::Free => BlockingFamily::from_blockers(ground.clone(), "free", vec![]).map_err(|e| ctx.core(at, e))?,
        ConstraintSpec::VertexCover { edges } => {
            let g = ctx.graph("constraint.edges", n, edges)?;
            BlockingFamily::vertex_cover(&g).and_then(|p| p.relabel(ground.clone())).map_err(|e| ctx.core(at, e))?
        }
        ConstraintSpec::EdgeCover { vertices, edges } => edge_family(ctx, ground, *vertices, edges, BlockingFamily::edge_cover)?,
        ConstraintSpec::StPath { vertices, edges, s, t } => {
            edge_family(ctx, ground, *vertices, edges, |g| BlockingFamily::st_path(g, *s, *t))?
        }
        ConstraintSpec::PrunedNetwork { vertices, edges, tau } => {
            edge_family(ctx, ground, *vertices, edges, |g| BlockingFamily::pruned_network(g, *tau))?
        }
        ConstraintSpec::HittingSet { sets } => {
            let sets = ctx.subsets("constraint.sets", sets, n)?;
            BlockingFamily::hitting_set(ground.clone(), sets).map_err(|e| ctx.core(at, e))?
        }
        ConstraintSpec::Cardinality { m } => BlockingFamily::cardinality(ground.clone(), *m).map_err(|e| ctx.core(at, e))?,
        ConstraintSpec::Blockers { members } => {
            let members = ctx.subsets("constraint.members", members, n)?;
            BlockingFamily::from_blockers(ground.clone(), "blockers", members).map_err(|e| ctx.core(at, e))?
        }
        _ => return Ok(None),
    };
    Ok(Some(p))
}

fn packing(ctx: &Ctx, spec: &ConstraintSpec, ground: &GroundSet) -> CliResult<Option<BaseFamily>> {
    let f = match spec {
        ConstraintSpec::Whole => BaseFamily::Whole(ground.clone()),
        ConstraintSpec::Free => BaseFamily::Free(ground.clone()),
        ConstraintSpec::Matroid { matroid: m } => BaseFamily::Matroid(matroid(ctx, m, ground, "constraint.matroid")?),
        ConstraintSpec::Intersection { matroids } => {
            let ms = matroids
                .iter()
                .enumerate()
                .map(|(i, m)| matroid(ctx, m, ground, &format!("constraint.matroids[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            BaseFamily::Intersection(MatroidIntersection::new(ms).map_err(|e| ctx.core("constraint", e))?)
        }
        _ => return Ok(None),
    };
    Ok(Some(f))
}

fn ring(
    ctx: &Ctx,
    ground: &GroundSet,
    implications: &[(usize, usize)],
    lower: &[usize],
    upper: &Option<Vec<usize>>,
    at: &str,
) -> CliResult<RingFamily> {
    let n = ground.len();
    let lower = ctx.subset(&format!("{at}.lower"), lower, n)?;
    let upper = match upper {
        Some(u) => ctx.subset(&format!("{at}.upper"), u, n)?,
        None => ground.full(),
    };
    RingFamily::new(ground.clone(), implications.to_vec(), lower, upper).map_err(|e| ctx.core(at, e))
}

/// Turns a parsed instance into oracles and families; `line` positions the errors.
pub fn build(instance: InstanceFile, line: usize) -> CliResult<Problem> {
    let ctx = Ctx { line };
    let ground = GroundSet::new(instance.ground.clone()).map_err(|e| ctx.core("ground", e))?;
    let (g, agents) = objective(&ctx, &instance.objective, &ground, "objective")?;
    let k = g.k();
    let task = instance.task;
    let mismatch = |what: &str| {
        ctx.err("constraint", format!("a {what} constraint does not fit task `{}`", task.id()))
    };
    let constraint = match (&instance.constraint, task) {
        (ConstraintSpec::Regions { regions, caps }, TaskSpec::Min) => {
            ctx.arity("constraint.regions", k, regions.len())?;
            if let Some(c) = caps {
                ctx.arity("constraint.caps", k, c.len())?;
            }
            let regions = ctx.subsets("constraint.regions", regions, ground.len())?;
            Constraint::Regions { regions, caps: caps.clone() }
        }
        (ConstraintSpec::Regions { .. }, _) => return Err(mismatch("regions")),
        (ConstraintSpec::Ring { implications, lower, upper }, TaskSpec::Min) => {
            let lifted = LiftedGroundSet::new(ground.clone(), k).map_err(|e| ctx.core("constraint", e))?;
            Constraint::Ring(ring(&ctx, lifted.ground(), implications, lower, upper, "constraint")?)
        }
        (ConstraintSpec::Ring { .. }, _) => return Err(mismatch("ring")),
        (spec, TaskSpec::Min | TaskSpec::LpOnly) => {
            Constraint::Covering(covering(&ctx, spec, &ground)?.ok_or_else(|| mismatch("packing"))?)
        }
        (spec, TaskSpec::Max | TaskSpec::Robust { .. }) => {
            Constraint::Packing(packing(&ctx, spec, &ground)?.ok_or_else(|| mismatch("covering"))?)
        }
    };
    let agent_families = if instance.agent_constraints.is_empty() {
        vec![AgentFamily::free(ground.clone()); k]
    } else {
        ctx.arity("agent_constraints", k, instance.agent_constraints.len())?;
        instance
            .agent_constraints
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let at = format!("agent_constraints[{i}]");
                Ok(match a {
                    AgentSpec::Free => AgentFamily::free(ground.clone()),
                    AgentSpec::Matroid { matroid: m } => {
                        AgentFamily::Matroid(matroid(&ctx, m, &ground, &format!("{at}.matroid"))?)
                    }
                    AgentSpec::Ring { implications, lower, upper } => {
                        AgentFamily::Ring(ring(&ctx, &ground, implications, lower, upper, &at)?)
                    }
                })
            })
            .collect::<CliResult<Vec<_>>>()?
    };
    if !agent_families.iter().all(|f| f.is_free()) && !matches!(task, TaskSpec::Max | TaskSpec::Robust { .. }) {
        return Err(ctx.err("agent_constraints", "per-agent families are only supported for max and robust tasks"));
    }
    let digest = digest(&instance);
    Ok(Problem { instance, digest, ground, k, objective: g, agents, constraint, agent_families, task })
}
