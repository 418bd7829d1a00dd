//! The lifting reduction between k-tuples over V and subsets of E = [k]×V.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matroids::{
    make_free, make_partition, make_union, BasesFamily, Matroid, MatroidIntersection, MatroidKind,
};
use crate::oracles::{MultivariateOracle, SubmodularOracle};
use crate::sfm::RingFamily;
use crate::subset::{GroundSet, SetTuple, Subset, MAX_ELEMENTS};

/// E = [k]×V with (i, v) at index i·n + v.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedGroundSet {
    base: GroundSet,
    k: usize,
    ground: GroundSet,
}

impl LiftedGroundSet {
    pub fn new(base: GroundSet, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("at least one agent required".into()));
        }
        if k * base.len() > MAX_ELEMENTS {
            return Err(Error::InvalidInput(format!("k·n = {} exceeds {MAX_ELEMENTS}", k * base.len())));
        }
        let labels = (0..k).flat_map(|i| base.labels().iter().map(move |l| format!("{i}:{l}"))).collect();
        let ground = GroundSet::new(labels)?;
        Ok(LiftedGroundSet { base, k, ground })
    }

    pub fn base(&self) -> &GroundSet {
        &self.base
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn index(&self, agent: usize, v: usize) -> usize {
        agent * self.n() + v
    }

    pub fn agent(&self, e: usize) -> usize {
        e / self.n()
    }

    pub fn element(&self, e: usize) -> usize {
        e % self.n()
    }

    /// {i}×V.
    pub fn agent_block(&self, agent: usize) -> Subset {
        Subset(Subset::full(self.n()).bits() << (agent * self.n()))
    }

    /// δ(v) = [k]×{v}.
    pub fn delta(&self, v: usize) -> Subset {
        Subset::from_iter((0..self.k).map(|i| self.index(i, v)))
    }

    pub fn delta_of(&self, b: Subset) -> Subset {
        b.iter().fold(Subset::EMPTY, |acc, v| acc.union(self.delta(v)))
    }

    /// Elements of V covered by S.
    pub fn cov(&self, s: Subset) -> Subset {
        self.unlift(s).union()
    }

    pub fn lift(&self, t: &SetTuple) -> Result<Subset> {
        if t.k() != self.k {
            return Err(Error::ArityMismatch { expected: self.k, got: t.k() });
        }
        let mut out = 0u64;
        for (i, &s) in t.parts().iter().enumerate() {
            self.base.check(s)?;
            out |= s.bits() << (i * self.n());
        }
        Ok(Subset(out))
    }

    pub fn unlift(&self, s: Subset) -> SetTuple {
        let full = Subset::full(self.n()).bits();
        SetTuple::new((0..self.k).map(|i| Subset((s.bits() >> (i * self.n())) & full)).collect())
    }

    /// Places a subset of V into agent `i`'s block.
    pub fn embed(&self, agent: usize, s: Subset) -> Subset {
        Subset(s.bits() << (agent * self.n()))
    }
}

/// f(S) = g(unlift(S)) on E. Flags are copied from g.
pub fn lift_oracle(g: &MultivariateOracle) -> Result<SubmodularOracle> {
    let lifted = LiftedGroundSet::new(g.ground().clone(), g.k())?;
    let g2 = g.clone();
    let l2 = lifted.clone();
    Ok(SubmodularOracle::new(lifted.ground().clone(), format!("lifted-{}", g.name()), g.flags(), move |s| {
        g2.value(&l2.unlift(s))
    }))
}

/// The inverse view: a set function on E read as a k-agent tuple function on V.
pub fn unlift_oracle(f: &SubmodularOracle, base: GroundSet, k: usize) -> Result<MultivariateOracle> {
    let lifted = LiftedGroundSet::new(base.clone(), k)?;
    if lifted.ground().len() != f.n() {
        return Err(Error::ArityMismatch { expected: lifted.ground().len(), got: f.n() });
    }
    let f2 = f.clone();
    MultivariateOracle::new(base, k, format!("unlifted-{}", f.name()), f.flags(), move |t| {
        f2.value(lifted.lift(t).expect("arity checked by caller"))
    })
}

/// A constraint family F on V for the lifted constructions.
#[derive(Clone)]
pub enum BaseFamily {
    /// 2^V.
    Free(GroundSet),
    /// {V}.
    Whole(GroundSet),
    Matroid(Matroid),
    Intersection(MatroidIntersection),
    Bases(BasesFamily),
    Membership(GroundSet, Arc<dyn Fn(Subset) -> bool + Send + Sync>),
}

impl fmt::Debug for BaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseFamily::Free(g) => write!(f, "Free(n={})", g.len()),
            BaseFamily::Whole(g) => write!(f, "Whole(n={})", g.len()),
            BaseFamily::Matroid(m) => write!(f, "{m:?}"),
            BaseFamily::Intersection(mi) => write!(f, "{mi:?}"),
            BaseFamily::Bases(b) => write!(f, "Bases({:?})", b.matroid()),
            BaseFamily::Membership(g, _) => write!(f, "Membership(n={})", g.len()),
        }
    }
}

impl BaseFamily {
    pub fn ground(&self) -> &GroundSet {
        match self {
            BaseFamily::Free(g) | BaseFamily::Whole(g) | BaseFamily::Membership(g, _) => g,
            BaseFamily::Matroid(m) => m.ground(),
            BaseFamily::Intersection(mi) => mi.ground(),
            BaseFamily::Bases(b) => b.matroid().ground(),
        }
    }

    pub fn contains(&self, s: Subset) -> bool {
        if !s.fits(self.ground().len()) {
            return false;
        }
        match self {
            BaseFamily::Free(_) => true,
            BaseFamily::Whole(g) => s == g.full(),
            BaseFamily::Matroid(m) => m.independent(s),
            BaseFamily::Intersection(mi) => mi.independent(s),
            BaseFamily::Bases(b) => b.is_base(s),
            BaseFamily::Membership(_, p) => p(s),
        }
    }
}

/// Per-agent constraint F_i.
#[derive(Clone)]
pub enum AgentFamily {
    Matroid(Matroid),
    Ring(RingFamily),
    Membership(GroundSet, Arc<dyn Fn(Subset) -> bool + Send + Sync>),
}

impl fmt::Debug for AgentFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentFamily::Matroid(m) => write!(f, "{m:?}"),
            AgentFamily::Ring(r) => write!(f, "{r:?}"),
            AgentFamily::Membership(g, _) => write!(f, "Membership(n={})", g.len()),
        }
    }
}

impl AgentFamily {
    pub fn free(ground: GroundSet) -> Self {
        AgentFamily::Matroid(make_free(ground))
    }

    pub fn ground(&self) -> &GroundSet {
        match self {
            AgentFamily::Matroid(m) => m.ground(),
            AgentFamily::Ring(r) => r.ground(),
            AgentFamily::Membership(g, _) => g,
        }
    }

    pub fn contains(&self, s: Subset) -> bool {
        match self {
            AgentFamily::Matroid(m) => m.independent(s),
            AgentFamily::Ring(r) => r.contains(s),
            AgentFamily::Membership(_, p) => p(s),
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, AgentFamily::Matroid(m) if matches!(m.kind(), MatroidKind::Free))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftedKind {
    H,
    Hprime,
    L,
}

/// Which structure-preservation case produced a lifted family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureTag {
    LiftedMatroid,
    LiftedIntersection,
    LiftedBases,
    /// F = 2^V: partition matroid with parts δ(v), caps 1.
    PartitionMatroid,
    /// F = {V}: bases of that partition matroid.
    PartitionBases,
    MatroidUnion,
    Ring,
}

#[derive(Clone, Debug)]
pub enum LiftedStructure {
    Matroid(Matroid),
    Intersection(MatroidIntersection),
    Bases(BasesFamily),
    Ring(RingFamily),
}

#[derive(Clone)]
pub struct LiftedFamily {
    lifted: LiftedGroundSet,
    kind: LiftedKind,
    member: Arc<dyn Fn(Subset) -> bool + Send + Sync>,
    structure: Option<(StructureTag, LiftedStructure)>,
}

impl fmt::Debug for LiftedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiftedFamily({:?}, {:?})", self.kind, self.structure.as_ref().map(|s| s.0))
    }
}

impl LiftedFamily {
    pub fn contains(&self, s: Subset) -> bool {
        s.fits(self.lifted.ground().len()) && (self.member)(s)
    }

    pub fn kind(&self) -> LiftedKind {
        self.kind
    }

    pub fn lifted(&self) -> &LiftedGroundSet {
        &self.lifted
    }

    pub fn tag(&self) -> Option<StructureTag> {
        self.structure.as_ref().map(|s| s.0)
    }

    pub fn structure(&self) -> Option<&LiftedStructure> {
        self.structure.as_ref().map(|s| &s.1)
    }

    pub fn matroid(&self) -> Option<&Matroid> {
        match self.structure() {
            Some(LiftedStructure::Matroid(m)) => Some(m),
            _ => None,
        }
    }
}

/// Independent iff components are disjoint and their union is independent in `m`.
pub fn lift_matroid(m: &Matroid, k: usize) -> Result<Matroid> {
    let lifted = LiftedGroundSet::new(m.ground().clone(), k)?;
    let inner = m.clone();
    let l2 = lifted.clone();
    Ok(Matroid::from_oracle(lifted.ground().clone(), MatroidKind::Lifted { agents: k }, move |s| {
        let t = l2.unlift(s);
        t.is_disjoint() && inner.independent(t.union())
    }))
}

/// Partition matroid on E with parts δ(v) and caps 1: "each element to at most one agent".
pub fn disjointness_matroid(lifted: &LiftedGroundSet) -> Result<Matroid> {
    let parts = (0..lifted.n()).map(|v| lifted.delta(v)).collect();
    make_partition(lifted.ground().clone(), parts, vec![1; lifted.n()])
}

pub fn lift_family_h(f: &BaseFamily, k: usize) -> Result<LiftedFamily> {
    let lifted = LiftedGroundSet::new(f.ground().clone(), k)?;
    let structure = match f {
        BaseFamily::Free(_) => {
            Some((StructureTag::PartitionMatroid, LiftedStructure::Matroid(disjointness_matroid(&lifted)?)))
        }
        BaseFamily::Whole(_) => Some((
            StructureTag::PartitionBases,
            LiftedStructure::Bases(BasesFamily::new(disjointness_matroid(&lifted)?)),
        )),
        BaseFamily::Matroid(m) => Some((StructureTag::LiftedMatroid, LiftedStructure::Matroid(lift_matroid(m, k)?))),
        BaseFamily::Intersection(mi) => {
            let ms = mi.matroids().iter().map(|m| lift_matroid(m, k)).collect::<Result<Vec<_>>>()?;
            Some((StructureTag::LiftedIntersection, LiftedStructure::Intersection(MatroidIntersection::new(ms)?)))
        }
        BaseFamily::Bases(b) => Some((
            StructureTag::LiftedBases,
            LiftedStructure::Bases(BasesFamily::new(lift_matroid(b.matroid(), k)?)),
        )),
        BaseFamily::Membership(..) => None,
    };
    let f2 = f.clone();
    let l2 = lifted.clone();
    let member = Arc::new(move |s: Subset| {
        let t = l2.unlift(s);
        t.is_disjoint() && f2.contains(t.union())
    });
    Ok(LiftedFamily { lifted, kind: LiftedKind::H, member, structure })
}

pub fn lift_family_hprime(fs: &[AgentFamily]) -> Result<LiftedFamily> {
    let first = fs.first().ok_or_else(|| Error::InvalidInput("at least one agent family required".into()))?;
    let base = first.ground().clone();
    if fs.iter().any(|f| f.ground() != &base) {
        return Err(Error::DomainMismatch("agent families on different ground sets".into()));
    }
    let lifted = LiftedGroundSet::new(base, fs.len())?;
    let structure = if fs.iter().all(|f| matches!(f, AgentFamily::Matroid(_))) {
        let pieces = fs
            .iter()
            .enumerate()
            .map(|(i, f)| match f {
                AgentFamily::Matroid(m) => (lifted.agent_block(i), m.clone()),
                _ => unreachable!(),
            })
            .collect();
        Some((StructureTag::MatroidUnion, LiftedStructure::Matroid(make_union(lifted.ground().clone(), pieces)?)))
    } else if fs.iter().all(|f| matches!(f, AgentFamily::Ring(_))) {
        let rings: Vec<&RingFamily> = fs
            .iter()
            .map(|f| match f {
                AgentFamily::Ring(r) => r,
                _ => unreachable!(),
            })
            .collect();
        Some((StructureTag::Ring, LiftedStructure::Ring(lift_rings(&lifted, &rings)?)))
    } else {
        None
    };
    let fs2 = fs.to_vec();
    let l2 = lifted.clone();
    let member = Arc::new(move |s: Subset| {
        let t = l2.unlift(s);
        fs2.iter().zip(t.parts()).all(|(f, &si)| f.contains(si))
    });
    Ok(LiftedFamily { lifted, kind: LiftedKind::Hprime, member, structure })
}

fn lift_rings(lifted: &LiftedGroundSet, rings: &[&RingFamily]) -> Result<RingFamily> {
    let mut implications = Vec::new();
    let (mut lower, mut upper) = (Subset::EMPTY, Subset::EMPTY);
    for (i, r) in rings.iter().enumerate() {
        implications.extend(r.implications().iter().map(|&(a, b)| (lifted.index(i, a), lifted.index(i, b))));
        lower = lower.union(lifted.embed(i, r.lower()));
        upper = upper.union(lifted.embed(i, r.upper()));
    }
    RingFamily::new(lifted.ground().clone(), implications, lower, upper)
}

/// L = H ∩ H′ as a membership oracle.
pub fn lift_family_l(f: &BaseFamily, fs: &[AgentFamily]) -> Result<LiftedFamily> {
    let h = lift_family_h(f, fs.len())?;
    let hp = lift_family_hprime(fs)?;
    if h.lifted != hp.lifted {
        return Err(Error::DomainMismatch("F and F_i on different ground sets".into()));
    }
    let (m1, m2) = (h.member.clone(), hp.member.clone());
    Ok(LiftedFamily { lifted: h.lifted, kind: LiftedKind::L, member: Arc::new(move |s| m1(s) && m2(s)), structure: None })
}

/// The (p+1)-matroid intersection on E: lifted F matroids plus the union of the F_i.
/// When every F_i is free, the last matroid is the disjointness partition matroid instead.
pub fn lift_constraint(f: &BaseFamily, fs: &[AgentFamily]) -> Result<MatroidIntersection> {
    let k = fs.len();
    let mut ms = match f {
        BaseFamily::Matroid(m) => vec![lift_matroid(m, k)?],
        BaseFamily::Intersection(mi) => mi.matroids().iter().map(|m| lift_matroid(m, k)).collect::<Result<_>>()?,
        BaseFamily::Free(g) | BaseFamily::Whole(g) => {
            vec![disjointness_matroid(&LiftedGroundSet::new(g.clone(), k)?)?]
        }
        other => return Err(Error::Unsupported(format!("lifted constraint for {other:?}"))),
    };
    if fs.iter().all(|a| a.is_free()) {
        let lifted = LiftedGroundSet::new(f.ground().clone(), k)?;
        ms.push(disjointness_matroid(&lifted)?);
    } else {
        match lift_family_hprime(fs)?.structure {
            Some((_, LiftedStructure::Matroid(m))) => ms.push(m),
            _ => return Err(Error::Unsupported("every F_i must be a matroid".into())),
        }
    }
    MatroidIntersection::new(ms)
}

/// k parallel copies of every edge; copy i of edge e has index i·m + e.
#[derive(Clone, Debug)]
pub struct CopiedGraph {
    pub original: Graph,
    pub k: usize,
    pub graph: Graph,
}

impl CopiedGraph {
    /// (original edge, copy index) of a copied edge.
    pub fn origin(&self, id: usize) -> (usize, usize) {
        let m = self.original.edge_count();
        (id % m, id / m)
    }

    pub fn edge_ground(&self) -> Result<LiftedGroundSet> {
        LiftedGroundSet::new(GroundSet::indexed(self.original.edge_count()), self.k)
    }
}

pub fn copy_graph(graph: &Graph, k: usize) -> Result<CopiedGraph> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let edges = (0..k).flat_map(|_| graph.edges.iter().copied()).collect();
    Ok(CopiedGraph { original: graph.clone(), k, graph: Graph::new(graph.vertices, edges)? })
}

/// Checks that a ring over E is closed under componentwise union and intersection
/// on up to `sample` of its members.
pub fn lift_mv_ring(d: RingFamily, sample: usize) -> Result<RingFamily> {
    let members = d.members_up_to(sample)?;
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i..] {
            if !d.contains(a.union(b)) || !d.contains(a.intersection(b)) {
                return Err(Error::InvalidInput(format!("ring not closed at {a:?}, {b:?}")));
            }
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroids::{make_uniform, verify_matroid_axioms};
    use crate::oracles::{make_decomposable, make_modular, make_quadratic, validate_submodular};
    use crate::rational::int;
    use crate::subset::all_subsets;

    #[test]
    fn lift_index_arithmetic() {
        let l = LiftedGroundSet::new(GroundSet::indexed(2), 2).unwrap();
        let t = SetTuple::new(vec![Subset::singleton(0), Subset::singleton(1)]);
        let s = l.lift(&t).unwrap();
        assert_eq!(s, Subset::from_iter([l.index(0, 0), l.index(1, 1)]));
        assert_eq!(l.unlift(s), t);
        assert_eq!(l.lift(&SetTuple::empty(2)).unwrap(), Subset::EMPTY);
        assert!(l.lift(&SetTuple::empty(3)).is_err());
    }

    #[test]
    fn decomposable_modular_lifts_to_modular() {
        let g = GroundSet::indexed(2);
        let f1 = make_modular(g.clone(), vec![int(1), int(2)]).unwrap();
        let f2 = make_modular(g, vec![int(3), int(4)]).unwrap();
        let f = lift_oracle(&make_decomposable(vec![f1, f2]).unwrap()).unwrap();
        for (e, w) in [1, 2, 3, 4].into_iter().enumerate() {
            assert_eq!(f.value(Subset::singleton(e)), int(w));
        }
        assert_eq!(f.value(Subset::full(4)), int(10));
    }

    #[test]
    fn lifted_quadratic_is_submodular() {
        let g = make_quadratic(GroundSet::indexed(2), vec![vec![int(0), int(-1)], vec![int(0), int(0)]], None).unwrap();
        assert!(validate_submodular(&lift_oracle(&g).unwrap()).unwrap().holds());
    }

    #[test]
    fn structured_lifts() {
        let g3 = GroundSet::indexed(3);
        let h = lift_family_h(&BaseFamily::Matroid(make_uniform(g3.clone(), 2).unwrap()), 2).unwrap();
        assert_eq!(h.tag(), Some(StructureTag::LiftedMatroid));
        assert!(verify_matroid_axioms(h.matroid().unwrap()).unwrap().holds());

        let free = lift_family_h(&BaseFamily::Free(g3.clone()), 2).unwrap();
        assert_eq!(free.tag(), Some(StructureTag::PartitionMatroid));

        let whole = lift_family_h(&BaseFamily::Whole(GroundSet::indexed(2)), 2).unwrap();
        let Some(LiftedStructure::Bases(b)) = whole.structure() else { panic!("bases expected") };
        let bases: Vec<Subset> = all_subsets(4).filter(|&s| b.is_base(s)).collect();
        assert_eq!(bases.len(), 4);
        assert!(bases.iter().all(|&s| whole.contains(s)));
    }

    #[test]
    fn union_of_uniforms_is_capped_partition() {
        let g3 = GroundSet::indexed(3);
        let fs = vec![
            AgentFamily::Matroid(make_uniform(g3.clone(), 1).unwrap()),
            AgentFamily::Matroid(make_uniform(g3.clone(), 2).unwrap()),
        ];
        let hp = lift_family_hprime(&fs).unwrap();
        assert_eq!(hp.tag(), Some(StructureTag::MatroidUnion));
        let l = LiftedGroundSet::new(g3, 2).unwrap();
        let caps = make_partition(l.ground().clone(), vec![l.agent_block(0), l.agent_block(1)], vec![1, 2]).unwrap();
        assert!(all_subsets(6).all(|s| hp.contains(s) == caps.independent(s)));
    }

    #[test]
    fn constraint_counts() {
        let g3 = GroundSet::indexed(3);
        let free = vec![AgentFamily::free(g3.clone()); 2];
        let one = lift_constraint(&BaseFamily::Matroid(make_uniform(g3.clone(), 2).unwrap()), &free).unwrap();
        assert_eq!(one.p(), 2);
        let two = MatroidIntersection::new(vec![make_uniform(g3.clone(), 2).unwrap(), make_uniform(g3.clone(), 1).unwrap()]).unwrap();
        assert_eq!(lift_constraint(&BaseFamily::Intersection(two), &free).unwrap().p(), 3);
    }

    #[test]
    fn copied_triangle() {
        let c = copy_graph(&Graph::complete(3), 2).unwrap();
        assert_eq!(c.graph.edge_count(), 6);
        assert_eq!(c.graph.vertices, 3);
        assert_eq!(c.origin(4), (1, 1));
    }
}
