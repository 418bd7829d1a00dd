//! Deterministic benchmark corpora modelled on the standard application families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_core::Error as CoreError;

use crate::error::{CliError, CliResult};
use crate::instance::{
    AgentSpec, ConstraintSpec, InstanceFile, MatroidSpec, ObjectiveSpec, SetFnSpec, TaskSpec, FORMAT_VERSION,
};
use crate::q::Q;

pub const FAMILIES: &[&str] =
    &["vertex-cover", "edge-cover", "welfare", "sensor-quadratic", "recommendation", "pruned-network", "msca"];

pub const MAX_N: usize = 10;
pub const MAX_K: usize = 4;
pub const MAX_LIFTED: usize = 24;
pub const MAX_COUNT: usize = 1000;
/// Edge-ground families keep the edge count here so exhaustive checks stay cheap.
const MAX_EDGES: usize = 9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenParams {
    /// Elements of V, or vertices for the edge-ground families.
    pub n: usize,
    /// Agents; the covering families cycle through 1..=k.
    pub k: usize,
    pub count: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n: 6, k: 2, count: 5, seed: 0 }
    }
}

fn refuse(what: &str, size: usize, cap: usize) -> CliError {
    CliError::Core(CoreError::CapExceeded { what: what.into(), size: size as u64, cap: cap as u64 })
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn random_coverage(rng: &mut ChaCha8Rng, n: usize) -> SetFnSpec {
    let items = n + 2;
    let covers = (0..n)
        .map(|_| {
            let mut c: Vec<usize> = (0..items).filter(|_| rng.gen_bool(0.35)).collect();
            if c.is_empty() {
                c.push(rng.gen_range(0..items));
            }
            c
        })
        .collect();
    let item_weights = Some((0..items).map(|_| Q::int(rng.gen_range(1..=4))).collect());
    SetFnSpec::Coverage { covers, item_weights }
}

fn random_concave_table(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    let mut table = vec![Q::int(0)];
    let mut step = rng.gen_range(0..=3i64);
    let mut total = 0;
    for _ in 0..n {
        total += step;
        table.push(Q::int(total));
        step = rng.gen_range(0..=step);
    }
    table
}

/// Coverage plus a concave function of |S| plus a nonnegative modular term.
fn random_monotone(rng: &mut ChaCha8Rng, n: usize) -> SetFnSpec {
    let cover = random_coverage(rng, n);
    let concave = SetFnSpec::ConcaveOfCardinality { table: random_concave_table(rng, n) };
    let modular = SetFnSpec::Modular { weights: (0..n).map(|_| Q::int(rng.gen_range(0..=2))).collect() };
    SetFnSpec::Sum { parts: vec![cover, concave, modular] }
}

fn agents(rng: &mut ChaCha8Rng, n: usize, k: usize) -> ObjectiveSpec {
    ObjectiveSpec::Agents { agents: (0..k).map(|_| random_monotone(rng, n)).collect() }
}

fn random_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.gen_bool(p)).collect();
    if edges.is_empty() {
        edges.push((0, 1));
    }
    edges
}

/// A random spanning tree plus a few extra edges, so no vertex is isolated.
fn connected_edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: Vec<(usize, usize)> = (1..n)
        .map(|i| {
            let (a, b) = (order[i], order[rng.gen_range(0..i)]);
            (a.min(b), a.max(b))
        })
        .collect();
    let extra = rng.gen_range(1..=3);
    for _ in 0..extra * 4 {
        if edges.len() >= (n - 1 + extra).min(MAX_EDGES) {
            break;
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let e = (a.min(b), a.max(b));
        if a != b && !edges.contains(&e) {
            edges.push(e);
        }
    }
    edges.sort();
    edges
}

fn edge_labels(edges: &[(usize, usize)]) -> Vec<String> {
    edges.iter().map(|(a, b)| format!("e{a}-{b}")).collect()
}

fn instance(
    name: String,
    ground: Vec<String>,
    objective: ObjectiveSpec,
    constraint: ConstraintSpec,
    agent_constraints: Vec<AgentSpec>,
    task: TaskSpec,
    seed: u64,
) -> InstanceFile {
    InstanceFile { version: FORMAT_VERSION.into(), name, ground, objective, constraint, agent_constraints, task, seed }
}

fn vertex_cover(rng: &mut ChaCha8Rng, p: &GenParams, i: usize) -> InstanceFile {
    let k = 1 + i % p.k;
    let edges = random_edges(rng, p.n, 0.45);
    let obj = agents(rng, p.n, k);
    let name = format!("vertex-cover-{i}");
    instance(name, labels("v", p.n), obj, ConstraintSpec::VertexCover { edges }, vec![], TaskSpec::Min, p.seed)
}

fn edge_cover(rng: &mut ChaCha8Rng, p: &GenParams, i: usize) -> InstanceFile {
    let k = 1 + i % p.k;
    let edges = connected_edges(rng, p.n);
    let obj = agents(rng, edges.len(), k);
    let constraint = ConstraintSpec::EdgeCover { vertices: p.n, edges: edges.clone() };
    instance(format!("edge-cover-{i}"), edge_labels(&edges), obj, constraint, vec![], TaskSpec::Min, p.seed)
}

/// Sub-stars of size τ+1 are the blocker; at least one vertex gets degree τ+1.
fn pruned_network(rng: &mut ChaCha8Rng, p: &GenParams, i: usize) -> InstanceFile {
    let k = 1 + i % p.k;
    let mut edges = connected_edges(rng, p.n);
    let tau = (1 + i % 2).min(p.n - 2);
    let hub = rng.gen_range(0..p.n);
    let mut others: Vec<usize> = (0..p.n).filter(|&v| v != hub).collect();
    others.shuffle(rng);
    for v in others {
        let degree = edges.iter().filter(|&&(a, b)| a == hub || b == hub).count();
        if degree > tau {
            break;
        }
        let e = (hub.min(v), hub.max(v));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    edges.sort();
    let obj = agents(rng, edges.len(), k);
    let constraint = ConstraintSpec::PrunedNetwork { vertices: p.n, edges: edges.clone(), tau };
    instance(format!("pruned-network-{i}"), edge_labels(&edges), obj, constraint, vec![], TaskSpec::Min, p.seed)
}

/// Items allocated to bidders with monotone valuations; F = {V} or 2^V.
fn welfare(rng: &mut ChaCha8Rng, p: &GenParams, i: usize) -> InstanceFile {
    let k = p.k.max(2);
    let obj = agents(rng, p.n, k);
    let constraint = if i % 2 == 0 { ConstraintSpec::Whole } else { ConstraintSpec::Free };
    instance(format!("welfare-{i}"), labels("x", p.n), obj, constraint, vec![], TaskSpec::Max, p.seed)
}

/// Σ_i coverage_i(S_i) + zᵀAz with a_ij + a_ji ≤ 0, under |S| ≤ b and per-location budgets.
fn sensor_quadratic(rng: &mut ChaCha8Rng, p: &GenParams, i: usize) -> InstanceFile {
    let k = p.k.max(2);
    let mut matrix = vec![vec![Q::int(0); k]; k];
    for a in 0..k {
        matrix[a][a] = Q::ratio(-rng.gen_range(0..=2), 4);
        for b in a + 1..k {
            let x = rng.gen_range(-2..=2);
            let slack = rng.gen_range(0..=2);
            matrix[a][b] = Q::ratio(x, 4);
            matrix[b][a] = Q::ratio(-x - slack, 4);
        }
    }
    let weights = Some((0..p.n).map(|_| Q::int(rng.gen_range(1..=2))).collect());
    let coverage = ObjectiveSpec::Agents { agents: (0..k).map(|_| random_coverage(rng, p.n)).collect() };
    let obj = ObjectiveSpec::Sum { parts: vec![coverage, ObjectiveSpec::Quadratic { matrix, weights }] };
    let constraint = ConstraintSpec::Matroid { matroid: MatroidSpec::Uniform { rank: (p.n / 2).max(1) } };
    let per_agent =
        (0..k).map(|_| AgentSpec::Matroid { matroid: MatroidSpec::Uniform { rank: rng.gen_range(1..=2) } }).collect();
    instance(format!("sensor-quadratic-{i}"), labels("s", p.n), obj, constraint, per_agent, TaskSpec::Max, p.seed)
}

/// Sellers recommend to buyers: F caps recommendations per buyer segment, each F_i is a
/// partition or laminar matroid over households.
fn recommendation(rng: &mut ChaCha8Rng, p: &GenParams, i: usize) -> InstanceFile {
    let k = p.k.max(2);
    let n = p.n;
    let half = n / 2;
    let segments = vec![(0..half).collect::<Vec<_>>(), (half..n).collect::<Vec<_>>()];
    let seg_caps = segments.iter().map(|s| s.len().saturating_sub(1).max(1)).collect();
    let (segments, seg_caps) = if half == 0 { (vec![(0..n).collect()], vec![n]) } else { (segments, seg_caps) };
    let constraint = ConstraintSpec::Matroid { matroid: MatroidSpec::Partition { parts: segments, caps: seg_caps } };
    let households: Vec<Vec<usize>> = (0..n).step_by(2).map(|a| (a..(a + 2).min(n)).collect()).collect();
    let per_agent = (0..k)
        .map(|a| {
            let matroid = if a % 2 == 0 {
                MatroidSpec::Partition { parts: households.clone(), caps: vec![1; households.len()] }
            } else {
                let mut family = households.clone();
                family.push((0..n).collect());
                let mut caps = vec![1; households.len()];
                caps.push(rng.gen_range(1..=2));
                MatroidSpec::Laminar { family, caps }
            };
            AgentSpec::Matroid { matroid }
        })
        .collect();
    let obj = ObjectiveSpec::Agents { agents: (0..k).map(|_| random_coverage(rng, n)).collect() };
    instance(format!("recommendation-{i}"), labels("b", n), obj, constraint, per_agent, TaskSpec::Max, p.seed)
}

/// Every element has a home agent; regions add random extras, caps cover the home load.
fn msca(rng: &mut ChaCha8Rng, p: &GenParams, i: usize) -> InstanceFile {
    let k = p.k.max(2);
    let n = p.n;
    let mut regions = vec![Vec::new(); k];
    let mut home_load = vec![0usize; k];
    for v in 0..n {
        let home = rng.gen_range(0..k);
        home_load[home] += 1;
        for (a, r) in regions.iter_mut().enumerate() {
            if a == home || rng.gen_bool(0.4) {
                r.push(v);
            }
        }
    }
    let caps = home_load.iter().map(|&h| (h + rng.gen_range(0..=1)).max(1)).collect();
    let obj = agents(rng, n, k);
    let constraint = ConstraintSpec::Regions { regions, caps: Some(caps) };
    instance(format!("msca-{i}"), labels("t", n), obj, constraint, vec![], TaskSpec::Min, p.seed)
}

fn family_index(family: &str) -> CliResult<usize> {
    FAMILIES
        .iter()
        .position(|f| *f == family)
        .ok_or_else(|| CliError::Usage(format!("unknown family `{family}`; known: {}", FAMILIES.join(", "))))
}

/// `count` instances of one family; the same seed always yields the same instances.
pub fn generate_corpus(family: &str, params: &GenParams) -> CliResult<Vec<InstanceFile>> {
    let idx = family_index(family)?;
    if params.n < 3 {
        return Err(CliError::Usage("n must be at least 3".into()));
    }
    if params.k == 0 {
        return Err(CliError::Usage("k must be at least 1".into()));
    }
    if params.n > MAX_N {
        return Err(refuse("n", params.n, MAX_N));
    }
    if params.k > MAX_K {
        return Err(refuse("k", params.k, MAX_K));
    }
    if params.n * params.k.max(2) > MAX_LIFTED {
        return Err(refuse("k·n", params.n * params.k.max(2), MAX_LIFTED));
    }
    if params.count > MAX_COUNT {
        return Err(refuse("count", params.count, MAX_COUNT));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(idx as u64);
    let make = [vertex_cover, edge_cover, welfare, sensor_quadratic, recommendation, pruned_network, msca][idx];
    Ok((0..params.count).map(|i| make(&mut rng, params, i)).collect())
}
