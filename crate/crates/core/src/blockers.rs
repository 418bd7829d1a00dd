//! Clutters, blockers and the covering polyhedron P*(F) = {z ≥ 0 : z(B) ≥ 1 for every blocker member B}.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{cap_check, Error, Result};
use crate::flow::MaxFlow;
use crate::graph::Graph;
use crate::oracles::DEFAULT_CAP;
use crate::rational::{lcm_of_denominators, Rational};
use crate::subset::{all_subsets, GroundSet, Subset};

/// An antichain of subsets, kept sorted by bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clutter {
    ground: GroundSet,
    members: Vec<Subset>,
}

impl Clutter {
    /// Errors if two members are comparable.
    pub fn new(ground: GroundSet, mut members: Vec<Subset>) -> Result<Self> {
        for &m in &members {
            ground.check(m)?;
        }
        members.sort();
        members.dedup();
        for (i, &a) in members.iter().enumerate() {
            if let Some(&b) = members[i + 1..].iter().find(|&&b| a.is_subset_of(b) || b.is_subset_of(a)) {
                return Err(Error::InvalidInput(format!("clutter members {a:?} and {b:?} are comparable")));
            }
        }
        Ok(Clutter { ground, members })
    }

    /// Keeps the inclusion-minimal sets.
    pub fn minimal(ground: GroundSet, sets: impl IntoIterator<Item = Subset>) -> Result<Self> {
        let mut sets: Vec<Subset> = sets.into_iter().collect();
        for &s in &sets {
            ground.check(s)?;
        }
        sets.sort_by_key(|s| (s.len(), s.bits()));
        sets.dedup();
        let mut kept: Vec<Subset> = Vec::new();
        for s in sets {
            if !kept.iter().any(|k| k.is_subset_of(s)) {
                kept.push(s);
            }
        }
        kept.sort();
        Ok(Clutter { ground, members: kept })
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max_member_size(&self) -> usize {
        self.members.iter().map(|m| m.len()).max().unwrap_or(0)
    }

    /// S contains some member.
    pub fn upward_closure_membership(&self, s: Subset) -> bool {
        self.members.iter().any(|m| m.is_subset_of(s))
    }

    /// S meets every member.
    pub fn is_transversal(&self, s: Subset) -> bool {
        self.members.iter().all(|m| !m.is_disjoint(s))
    }
}

/// Minimal transversals of a clutter's members, by enumeration.
pub fn compute_blocker(c: &Clutter) -> Result<Clutter> {
    compute_blocker_with_cap(c, DEFAULT_CAP)
}

pub fn compute_blocker_with_cap(c: &Clutter, cap: usize) -> Result<Clutter> {
    let n = c.ground.len();
    cap_check("ground set size", n as u64, cap as u64)?;
    let hits: Vec<bool> = all_subsets(n).map(|s| c.is_transversal(s)).collect();
    let members = all_subsets(n)
        .filter(|&s| hits[s.bits() as usize] && s.iter().all(|v| !hits[s.without(v).bits() as usize]))
        .collect();
    Ok(Clutter { ground: c.ground.clone(), members })
}

/// Minimal members of an upward-closed family given by a membership predicate.
pub fn minimal_sets(ground: &GroundSet, member: impl Fn(Subset) -> bool, cap: usize) -> Result<Clutter> {
    let n = ground.len();
    cap_check("ground set size", n as u64, cap as u64)?;
    let table: Vec<bool> = all_subsets(n).map(&member).collect();
    let members = all_subsets(n)
        .filter(|&s| table[s.bits() as usize] && s.iter().all(|v| !table[s.without(v).bits() as usize]))
        .collect();
    Ok(Clutter { ground: ground.clone(), members })
}

/// B(B(C)) = C.
pub fn verify_lehman(c: &Clutter) -> Result<bool> {
    Ok(compute_blocker(&compute_blocker(c)?)? == *c)
}

/// Finds a blocker member B with z(B) < 1, or reports z feasible.
pub trait SeparationOracle: Send + Sync {
    fn separate(&self, z: &[Rational]) -> Option<Subset>;
}

#[derive(Clone)]
pub enum BlockerSource {
    Explicit(Clutter),
    Oracle(Arc<dyn SeparationOracle>),
}

impl fmt::Debug for BlockerSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockerSource::Explicit(c) => write!(f, "Explicit({} members)", c.len()),
            BlockerSource::Oracle(_) => write!(f, "Oracle"),
        }
    }
}

/// An upward-closed family F↑ described by its blocker B(F).
#[derive(Clone, Debug)]
pub struct BlockingFamily {
    ground: GroundSet,
    name: String,
    source: BlockerSource,
    beta: Option<usize>,
}

impl BlockingFamily {
    /// `blockers` are the members of B(F); they are minimalized.
    pub fn from_blockers(ground: GroundSet, name: &str, blockers: Vec<Subset>) -> Result<Self> {
        let c = Clutter::minimal(ground.clone(), blockers)?;
        let beta = Some(c.max_member_size());
        Ok(BlockingFamily { ground, name: name.into(), source: BlockerSource::Explicit(c), beta })
    }

    pub fn from_oracle(
        ground: GroundSet,
        name: &str,
        oracle: Arc<dyn SeparationOracle>,
        beta: Option<usize>,
    ) -> Self {
        BlockingFamily { ground, name: name.into(), source: BlockerSource::Oracle(oracle), beta }
    }

    /// Upward closure of the sets satisfying `member`, with the blocker computed by enumeration.
    pub fn from_membership(ground: GroundSet, name: &str, member: impl Fn(Subset) -> bool) -> Result<Self> {
        let mins = minimal_sets(&ground, member, DEFAULT_CAP)?;
        let b = compute_blocker(&mins)?;
        Self::from_blockers(ground, name, b.members().to_vec())
    }

    /// F = {V}: every singleton is a blocker member.
    pub fn whole(ground: GroundSet) -> Self {
        let singles = (0..ground.len()).map(Subset::singleton).collect();
        Self::from_blockers(ground, "whole", singles).expect("singletons fit")
    }

    /// Vertex covers of a graph; the blocker is the edge set.
    pub fn vertex_cover(graph: &Graph) -> Result<Self> {
        let ground = GroundSet::indexed(graph.vertices);
        let edges = graph.edges.iter().map(|&(a, b)| Subset::singleton(a).with(b)).collect();
        Self::from_blockers(ground, "vertex-cover", edges)
    }

    /// Edge covers of a graph; the blocker is the set of vertex stars.
    pub fn edge_cover(graph: &Graph) -> Result<Self> {
        let ground = edge_ground(graph)?;
        let mut stars = Vec::new();
        for v in 0..graph.vertices {
            let star = graph.star(v);
            if star.is_empty() {
                return Err(Error::Infeasible(format!("vertex {v} is isolated; no edge cover exists")));
            }
            stars.push(star);
        }
        Self::from_blockers(ground, "edge-cover", stars)
    }

    pub fn hitting_set(ground: GroundSet, sets: Vec<Subset>) -> Result<Self> {
        if sets.iter().any(|s| s.is_empty()) {
            return Err(Error::Infeasible("an empty set cannot be hit".into()));
        }
        Self::from_blockers(ground, "hitting-set", sets)
    }

    /// {S : |S| ≥ m}. Its blocker is every (n−m+1)-subset.
    pub fn cardinality(ground: GroundSet, m: usize) -> Result<Self> {
        let n = ground.len();
        if m > n {
            return Err(Error::Infeasible(format!("no subset of {n} elements has size {m}")));
        }
        let beta = (m > 0).then_some(n - m + 1);
        Ok(Self::from_oracle(ground, "cardinality", Arc::new(CardinalitySeparation { n, m }), beta))
    }

    /// Edge sets containing an s–t path. The blocker is the family of minimal s–t cuts.
    pub fn st_path(graph: &Graph, s: usize, t: usize) -> Result<Self> {
        if s >= graph.vertices || t >= graph.vertices || s == t {
            return Err(Error::InvalidInput(format!("bad terminals ({s},{t})")));
        }
        if !graph.connects(Subset::full(graph.edge_count()), s, t) {
            return Err(Error::Infeasible("terminals are disconnected".into()));
        }
        let ground = edge_ground(graph)?;
        let oracle = StCutSeparation { graph: graph.clone(), s, t };
        Ok(Self::from_oracle(ground, "st-path", Arc::new(oracle), None))
    }

    /// Edge sets whose removal leaves every vertex with degree ≤ τ.
    /// Blocker members are the sub-stars of size τ+1.
    pub fn pruned_network(graph: &Graph, tau: usize) -> Result<Self> {
        let ground = edge_ground(graph)?;
        let mut members = Vec::new();
        for v in 0..graph.vertices {
            let star: Vec<usize> = graph.star(v).iter().collect();
            if star.len() > tau {
                for_each_combination(&star, tau + 1, &mut |c| members.push(Subset::from_iter(c.iter().copied())));
            }
        }
        let mut fam = Self::from_blockers(ground, "pruned-network", members)?;
        fam.beta = Some(tau + 1);
        Ok(fam)
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn beta(&self) -> Option<usize> {
        self.beta
    }

    pub fn with_beta(mut self, beta: Option<usize>) -> Self {
        self.beta = beta;
        self
    }

    /// Same family over a ground set of equal size with different labels.
    pub fn relabel(mut self, ground: GroundSet) -> Result<Self> {
        if ground.len() != self.n() {
            return Err(Error::ArityMismatch { expected: self.n(), got: ground.len() });
        }
        if let BlockerSource::Explicit(c) = &self.source {
            self.source = BlockerSource::Explicit(Clutter::new(ground.clone(), c.members().to_vec())?);
        }
        self.ground = ground;
        Ok(self)
    }

    pub fn source(&self) -> &BlockerSource {
        &self.source
    }

    pub fn explicit(&self) -> Option<&Clutter> {
        match &self.source {
            BlockerSource::Explicit(c) => Some(c),
            BlockerSource::Oracle(_) => None,
        }
    }

    /// Blocker members, enumerated through the separation oracle's membership test when implicit.
    pub fn blockers(&self, cap: usize) -> Result<Clutter> {
        match &self.source {
            BlockerSource::Explicit(c) => Ok(c.clone()),
            BlockerSource::Oracle(_) => {
                let mins = minimal_sets(&self.ground, |s| self.contains(s), cap)?;
                compute_blocker_with_cap(&mins, cap)
            }
        }
    }

    /// S ∈ F↑, i.e. S meets every blocker member.
    pub fn contains(&self, s: Subset) -> bool {
        match &self.source {
            BlockerSource::Explicit(c) => c.is_transversal(s),
            BlockerSource::Oracle(o) => o.separate(&indicator(self.n(), s)).is_none(),
        }
    }

    pub fn separate(&self, z: &[Rational]) -> Result<Option<Subset>> {
        if z.len() != self.n() {
            return Err(Error::DomainMismatch(format!("point has {} entries, ground set {}", z.len(), self.n())));
        }
        if z.iter().any(|x| x.is_negative()) {
            return Err(Error::Precondition("fractional point has a negative entry".into()));
        }
        Ok(match &self.source {
            BlockerSource::Explicit(c) => most_violated(c.members(), z),
            BlockerSource::Oracle(o) => o.separate(z),
        })
    }
}

fn edge_ground(graph: &Graph) -> Result<GroundSet> {
    if graph.edge_count() == 0 {
        return Err(Error::InvalidInput("graph has no edges".into()));
    }
    GroundSet::new(graph.edges.iter().enumerate().map(|(e, (a, b))| format!("e{e}:{a}-{b}")).collect())
}

pub fn indicator(n: usize, s: Subset) -> Vec<Rational> {
    (0..n).map(|v| if s.contains(v) { Rational::one() } else { Rational::zero() }).collect()
}

pub fn mass(z: &[Rational], s: Subset) -> Rational {
    s.iter().fold(Rational::zero(), |acc, v| acc + &z[v])
}

fn most_violated(members: &[Subset], z: &[Rational]) -> Option<Subset> {
    let mut best: Option<(Rational, Subset)> = None;
    for &b in members {
        let m = mass(z, b);
        // Ties go to the later member in bitmask order.
        if m < Rational::one() && best.as_ref().is_none_or(|(bm, _)| &m <= bm) {
            best = Some((m, b));
        }
    }
    best.map(|(_, b)| b)
}

fn for_each_combination(items: &[usize], r: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(items: &[usize], r: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == r {
            f(cur);
            return;
        }
        for i in start..items.len() {
            if items.len() - i < r - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, r, i + 1, cur, f);
            cur.pop();
        }
    }
    go(items, r, 0, &mut Vec::new(), f);
}

struct CardinalitySeparation {
    n: usize,
    m: usize,
}

impl SeparationOracle for CardinalitySeparation {
    fn separate(&self, z: &[Rational]) -> Option<Subset> {
        if self.m == 0 {
            return None;
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| z[a].cmp(&z[b]).then(a.cmp(&b)));
        let b = Subset::from_iter(order.into_iter().take(self.n - self.m + 1));
        (mass(z, b) < Rational::one()).then_some(b)
    }
}

struct StCutSeparation {
    graph: Graph,
    s: usize,
    t: usize,
}

impl SeparationOracle for StCutSeparation {
    fn separate(&self, z: &[Rational]) -> Option<Subset> {
        let scale = lcm_of_denominators(z);
        let mut net = MaxFlow::new(self.graph.vertices);
        for (e, &(a, b)) in self.graph.edges.iter().enumerate() {
            let c: BigInt = z[e].numer() * (&scale / z[e].denom());
            if a != b && !c.is_zero() {
                net.add_undirected(a, b, &c);
            }
        }
        if Rational::new(net.run(self.s, self.t), scale) >= Rational::one() {
            return None;
        }
        let side = net.reachable(self.s);
        let cut = Subset::from_iter(
            self.graph.edges.iter().enumerate().filter(|(_, &(a, b))| side[a] != side[b]).map(|(e, _)| e),
        );
        // Shrink to a minimal s–t cut; dropping edges never raises z(cut).
        let all = Subset::full(self.graph.edge_count());
        let mut cut_min = cut;
        for e in cut.iter() {
            let trial = cut_min.without(e);
            if !self.graph.connects(all.difference(trial), self.s, self.t) {
                cut_min = trial;
            }
        }
        Some(cut_min)
    }
}

/// Lifted family on [k]×V: blocker members are ∪_{v∈B} δ(v) for B ∈ B(F),
/// and w is feasible iff z(v) = Σ_i w(i, v) is feasible for F.
pub fn lift_separation(p: &BlockingFamily, k: usize) -> Result<BlockingFamily> {
    let n = p.n();
    let lifted = crate::lifting::LiftedGroundSet::new(p.ground().clone(), k)?;
    let ground = lifted.ground().clone();
    let beta = p.beta().map(|b| b * k);
    Ok(match p.source() {
        BlockerSource::Explicit(c) => {
            let members = c.members().iter().map(|&b| lifted.delta_of(b)).collect();
            BlockingFamily::from_blockers(ground, &format!("lifted-{}", p.name()), members)?.with_beta(beta)
        }
        BlockerSource::Oracle(_) => {
            let inner = p.clone();
            let oracle = LiftedSeparation { inner, lifted, n, k };
            BlockingFamily::from_oracle(ground, &format!("lifted-{}", p.name()), Arc::new(oracle), beta)
        }
    })
}

struct LiftedSeparation {
    inner: BlockingFamily,
    lifted: crate::lifting::LiftedGroundSet,
    n: usize,
    k: usize,
}

impl SeparationOracle for LiftedSeparation {
    fn separate(&self, w: &[Rational]) -> Option<Subset> {
        let z: Vec<Rational> =
            (0..self.n).map(|v| (0..self.k).fold(Rational::zero(), |acc, i| acc + &w[i * self.n + v])).collect();
        self.inner.separate(&z).ok().flatten().map(|b| self.lifted.delta_of(b))
    }
}

/// Removes elements in ascending order while χ^S stays in P*(F).
pub fn prune_to_minimal(s: Subset, p: &BlockingFamily) -> Result<Subset> {
    p.ground().check(s)?;
    if !p.contains(s) {
        return Err(Error::Infeasible(format!("{} is not in the upward closure", p.ground().format_subset(s))));
    }
    let mut m = s;
    for v in s.iter() {
        if p.contains(m.without(v)) {
            m = m.without(v);
        }
    }
    Ok(m)
}
