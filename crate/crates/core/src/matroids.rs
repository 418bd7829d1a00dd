//! Matroids exposed through independence oracles, their intersections and bases families.

use std::fmt;
use std::sync::Arc;

use crate::error::{cap_check, Error, Result};
use crate::graph::Graph;
use crate::subset::{all_subsets, GroundSet, Subset};

type IndepFn = dyn Fn(Subset) -> bool + Send + Sync;

/// Which constructor produced a matroid; informational only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidKind {
    Free,
    Uniform { b: usize },
    Partition { parts: Vec<Subset>, caps: Vec<usize> },
    Laminar { family: Vec<Subset>, caps: Vec<usize> },
    Graphic { graph: Graph },
    Union { pieces: Vec<Subset> },
    Lifted { agents: usize },
    Custom(String),
}

#[derive(Clone)]
pub struct Matroid {
    ground: GroundSet,
    kind: MatroidKind,
    indep: Arc<IndepFn>,
    rank_hint: Option<usize>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matroid({:?}, n={})", self.kind, self.ground.len())
    }
}

impl Matroid {
    /// Wraps an arbitrary independence oracle. Axioms are not checked here;
    /// use [`verify_matroid_axioms`].
    pub fn from_oracle(
        ground: GroundSet,
        kind: MatroidKind,
        indep: impl Fn(Subset) -> bool + Send + Sync + 'static,
    ) -> Matroid {
        Matroid { ground, kind, indep: Arc::new(indep), rank_hint: None }
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn kind(&self) -> &MatroidKind {
        &self.kind
    }

    pub fn rank_hint(&self) -> Option<usize> {
        self.rank_hint
    }

    pub fn independent(&self, s: Subset) -> bool {
        s.fits(self.n()) && (self.indep)(s)
    }

    /// Rank by greedy augmentation in ascending element order.
    pub fn rank(&self, s: Subset) -> usize {
        let mut chosen = Subset::EMPTY;
        for v in s.iter() {
            if self.independent(chosen.with(v)) {
                chosen = chosen.with(v);
            }
        }
        chosen.len()
    }

    pub fn full_rank(&self) -> usize {
        self.rank_hint.unwrap_or_else(|| self.rank(self.ground.full()))
    }

    /// Same matroid over a ground set of equal size with different labels.
    pub fn relabel(mut self, ground: GroundSet) -> Result<Matroid> {
        if ground.len() != self.n() {
            return Err(Error::ArityMismatch { expected: self.n(), got: ground.len() });
        }
        self.ground = ground;
        Ok(self)
    }

    pub fn restricted_to(&self, allowed: Subset) -> Matroid {
        let inner = self.clone();
        Matroid::from_oracle(self.ground.clone(), MatroidKind::Custom("restriction".into()), move |s| {
            s.is_subset_of(allowed) && inner.independent(s)
        })
    }
}

pub fn make_free(ground: GroundSet) -> Matroid {
    let n = ground.len();
    Matroid { ground, kind: MatroidKind::Free, indep: Arc::new(|_| true), rank_hint: Some(n) }
}

pub fn make_uniform(ground: GroundSet, b: usize) -> Result<Matroid> {
    if b > ground.len() {
        return Err(Error::InvalidInput(format!("uniform rank {b} exceeds n = {}", ground.len())));
    }
    Ok(Matroid { ground, kind: MatroidKind::Uniform { b }, indep: Arc::new(move |s| s.len() <= b), rank_hint: Some(b) })
}

pub fn make_partition(ground: GroundSet, parts: Vec<Subset>, caps: Vec<usize>) -> Result<Matroid> {
    if parts.len() != caps.len() {
        return Err(Error::ArityMismatch { expected: parts.len(), got: caps.len() });
    }
    let mut seen = Subset::EMPTY;
    for &p in &parts {
        ground.check(p)?;
        if !seen.is_disjoint(p) {
            return Err(Error::InvalidInput("partition parts overlap".into()));
        }
        seen = seen.union(p);
    }
    if seen != ground.full() {
        return Err(Error::InvalidInput("partition parts do not cover the ground set".into()));
    }
    let rank = parts.iter().zip(&caps).map(|(p, &c)| c.min(p.len())).sum();
    let (p2, c2) = (parts.clone(), caps.clone());
    Ok(Matroid {
        ground,
        kind: MatroidKind::Partition { parts, caps },
        indep: Arc::new(move |s| p2.iter().zip(&c2).all(|(p, &c)| s.intersection(*p).len() <= c)),
        rank_hint: Some(rank),
    })
}

pub fn is_laminar(family: &[Subset]) -> bool {
    family.iter().enumerate().all(|(i, &a)| {
        family[i + 1..].iter().all(|&b| a.is_disjoint(b) || a.is_subset_of(b) || b.is_subset_of(a))
    })
}

pub fn make_laminar(ground: GroundSet, family: Vec<Subset>, caps: Vec<usize>) -> Result<Matroid> {
    if family.len() != caps.len() {
        return Err(Error::ArityMismatch { expected: family.len(), got: caps.len() });
    }
    for &a in &family {
        ground.check(a)?;
    }
    if !is_laminar(&family) {
        return Err(Error::InvalidInput("family is not laminar".into()));
    }
    let (f2, c2) = (family.clone(), caps.clone());
    Ok(Matroid {
        ground,
        kind: MatroidKind::Laminar { family, caps },
        indep: Arc::new(move |s| f2.iter().zip(&c2).all(|(a, &c)| s.intersection(*a).len() <= c)),
        rank_hint: None,
    })
}

/// Cycle matroid of a multigraph; the ground set is the edge list.
pub fn make_graphic(graph: Graph) -> Result<Matroid> {
    if graph.edge_count() == 0 {
        return Err(Error::InvalidInput("graphic matroid needs at least one edge".into()));
    }
    let labels = graph.edges.iter().enumerate().map(|(e, (a, b))| format!("e{e}:{a}-{b}")).collect();
    let ground = GroundSet::new(labels)?;
    let g2 = graph.clone();
    Ok(Matroid {
        ground,
        kind: MatroidKind::Graphic { graph },
        indep: Arc::new(move |s| g2.is_forest(s)),
        rank_hint: None,
    })
}

/// Disjoint-ground union. Element j of `pieces[i].1` corresponds to the j-th
/// smallest element of the piece mask `pieces[i].0` in `ground`.
pub fn make_union(ground: GroundSet, pieces: Vec<(Subset, Matroid)>) -> Result<Matroid> {
    let mut seen = Subset::EMPTY;
    for (mask, m) in &pieces {
        ground.check(*mask)?;
        if !seen.is_disjoint(*mask) {
            return Err(Error::InvalidInput("union pieces overlap".into()));
        }
        if mask.len() != m.n() {
            return Err(Error::ArityMismatch { expected: mask.len(), got: m.n() });
        }
        seen = seen.union(*mask);
    }
    if seen != ground.full() {
        return Err(Error::InvalidInput("union pieces do not cover the ground set".into()));
    }
    let masks: Vec<Subset> = pieces.iter().map(|p| p.0).collect();
    let maps: Vec<Vec<usize>> = masks.iter().map(|m| m.iter().collect()).collect();
    let parts: Vec<Matroid> = pieces.into_iter().map(|p| p.1).collect();
    let indep = move |s: Subset| {
        maps.iter().zip(&parts).all(|(map, m)| {
            let local = map.iter().enumerate().filter(|(_, &e)| s.contains(e)).map(|(j, _)| j);
            m.independent(Subset::from_iter(local))
        })
    };
    Ok(Matroid { ground, kind: MatroidKind::Union { pieces: masks }, indep: Arc::new(indep), rank_hint: None })
}

/// Sets independent in every member matroid. Not itself a matroid.
#[derive(Clone, Debug)]
pub struct MatroidIntersection {
    matroids: Vec<Matroid>,
}

impl MatroidIntersection {
    pub fn new(matroids: Vec<Matroid>) -> Result<Self> {
        let first = matroids.first().ok_or_else(|| Error::InvalidInput("empty matroid intersection".into()))?;
        if matroids.iter().any(|m| m.ground() != first.ground()) {
            return Err(Error::DomainMismatch("intersected matroids on different ground sets".into()));
        }
        Ok(MatroidIntersection { matroids })
    }

    pub fn matroids(&self) -> &[Matroid] {
        &self.matroids
    }

    pub fn p(&self) -> usize {
        self.matroids.len()
    }

    pub fn ground(&self) -> &GroundSet {
        self.matroids[0].ground()
    }

    pub fn independent(&self, s: Subset) -> bool {
        self.matroids.iter().all(|m| m.independent(s))
    }

    pub fn rank(&self, _s: Subset) -> Result<usize> {
        Err(Error::Unsupported("rank of a matroid intersection".into()))
    }
}

/// Maximum-size independent sets of a matroid.
#[derive(Clone, Debug)]
pub struct BasesFamily {
    matroid: Matroid,
    rank: usize,
}

impl BasesFamily {
    pub fn new(matroid: Matroid) -> Self {
        let rank = matroid.full_rank();
        BasesFamily { matroid, rank }
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_base(&self, s: Subset) -> bool {
        s.len() == self.rank && self.matroid.independent(s)
    }
}

/// Either a single matroid or an intersection; the constraint shape greedy accepts.
#[derive(Clone, Debug)]
pub enum IndependenceSystem {
    Matroid(Matroid),
    Intersection(MatroidIntersection),
}

impl IndependenceSystem {
    pub fn independent(&self, s: Subset) -> bool {
        match self {
            IndependenceSystem::Matroid(m) => m.independent(s),
            IndependenceSystem::Intersection(mi) => mi.independent(s),
        }
    }

    pub fn ground(&self) -> &GroundSet {
        match self {
            IndependenceSystem::Matroid(m) => m.ground(),
            IndependenceSystem::Intersection(mi) => mi.ground(),
        }
    }

    /// Number of matroids intersected.
    pub fn p(&self) -> usize {
        match self {
            IndependenceSystem::Matroid(_) => 1,
            IndependenceSystem::Intersection(mi) => mi.p(),
        }
    }
}

impl From<Matroid> for IndependenceSystem {
    fn from(m: Matroid) -> Self {
        IndependenceSystem::Matroid(m)
    }
}

impl From<MatroidIntersection> for IndependenceSystem {
    fn from(m: MatroidIntersection) -> Self {
        IndependenceSystem::Intersection(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatroidWitness {
    EmptyDependent,
    /// Independent I, J with |I| < |J| and no x ∈ J∖I keeping I+x independent.
    Exchange { smaller: Subset, larger: Subset },
    /// Independent `set` with a dependent `subset`.
    Hereditary { set: Subset, subset: Subset },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomVerdict {
    Holds,
    Witness(MatroidWitness),
}

impl AxiomVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, AxiomVerdict::Holds)
    }
}

pub fn verify_matroid_axioms(m: &Matroid) -> Result<AxiomVerdict> {
    verify_independence_axioms(m.n(), |s| m.independent(s), crate::oracles::DEFAULT_CAP)
}

/// Exhaustive axiom check of an independence predicate on `n` elements.
/// Order: nonempty family, exchange, hereditary.
pub fn verify_independence_axioms(n: usize, indep: impl Fn(Subset) -> bool, cap: usize) -> Result<AxiomVerdict> {
    cap_check("ground set size", n as u64, cap as u64)?;
    let table: Vec<bool> = all_subsets(n).map(&indep).collect();
    if !table[0] {
        return Ok(AxiomVerdict::Witness(MatroidWitness::EmptyDependent));
    }
    // best[M] = a largest independent subset of M.
    let mut best = vec![Subset::EMPTY; table.len()];
    for m in all_subsets(n) {
        let i = m.bits() as usize;
        best[i] = if table[i] {
            m
        } else {
            m.iter().map(|v| best[m.without(v).bits() as usize]).max_by_key(|s| s.len()).unwrap_or(Subset::EMPTY)
        };
    }
    for small in all_subsets(n) {
        if !table[small.bits() as usize] {
            continue;
        }
        let augmenting = Subset::from_iter((0..n).filter(|&x| !small.contains(x) && table[small.with(x).bits() as usize]));
        let rest = Subset::full(n).difference(augmenting);
        let large = best[rest.bits() as usize];
        if large.len() > small.len() {
            return Ok(AxiomVerdict::Witness(MatroidWitness::Exchange { smaller: small, larger: large }));
        }
    }
    for set in all_subsets(n) {
        if !table[set.bits() as usize] {
            continue;
        }
        if let Some(v) = set.iter().find(|&v| !table[set.without(v).bits() as usize]) {
            return Ok(AxiomVerdict::Witness(MatroidWitness::Hereditary { set, subset: set.without(v) }));
        }
    }
    Ok(AxiomVerdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{validate_submodular, Flags, SubmodularOracle};
    use crate::rational::int;

    fn g(n: usize) -> GroundSet {
        GroundSet::indexed(n)
    }

    #[test]
    fn uniform_counts() {
        let m = make_uniform(g(3), 2).unwrap();
        assert_eq!(all_subsets(3).filter(|&s| m.independent(s)).count(), 7);
        assert_eq!(m.rank(Subset::full(3)), 2);
        let zero = make_uniform(g(3), 0).unwrap();
        assert_eq!(all_subsets(3).filter(|&s| zero.independent(s)).count(), 1);
        assert!(make_uniform(g(3), 4).is_err());
    }

    #[test]
    fn partition_and_laminar() {
        let p = make_partition(g(3), vec![Subset::from_iter([0, 1]), Subset::singleton(2)], vec![1, 1]).unwrap();
        assert!(!p.independent(Subset::from_iter([0, 1])));
        assert!(p.independent(Subset::from_iter([0, 2])));
        assert!(make_partition(g(3), vec![Subset::from_iter([0, 1])], vec![1]).is_err());
        let l = make_laminar(g(3), vec![Subset::singleton(0), Subset::full(3)], vec![0, 2]).unwrap();
        assert!(all_subsets(3).all(|s| !(l.independent(s) && s.contains(0))));
        assert!(make_laminar(g(3), vec![Subset::from_iter([0, 1]), Subset::from_iter([1, 2])], vec![1, 1]).is_err());
        let empty = make_laminar(g(3), vec![], vec![]).unwrap();
        assert!(empty.independent(Subset::full(3)));
    }

    #[test]
    fn graphic_cycles() {
        let tri = make_graphic(Graph::complete(3)).unwrap();
        assert!(!tri.independent(Subset::full(3)));
        let b = BasesFamily::new(tri);
        assert!(b.is_base(Subset::from_iter([0, 2])));
        let parallel = make_graphic(Graph::new(2, vec![(0, 1), (0, 1)]).unwrap()).unwrap();
        assert!(parallel.independent(Subset::singleton(0)));
        assert!(!parallel.independent(Subset::full(2)));
    }

    #[test]
    fn intersection_has_no_rank() {
        let mi = MatroidIntersection::new(vec![make_uniform(g(3), 1).unwrap(), make_uniform(g(3), 2).unwrap()]).unwrap();
        assert!(!mi.independent(Subset::from_iter([0, 1])));
        assert!(matches!(mi.rank(Subset::full(3)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn axioms() {
        assert!(verify_matroid_axioms(&make_uniform(g(4), 2).unwrap()).unwrap().holds());
        assert!(verify_matroid_axioms(&make_graphic(Graph::complete(4)).unwrap()).unwrap().holds());
        let bad = Matroid::from_oracle(g(2), MatroidKind::Custom("bad".into()), |s| s.is_empty() || s.len() == 2);
        assert_eq!(
            verify_matroid_axioms(&bad).unwrap(),
            AxiomVerdict::Witness(MatroidWitness::Exchange { smaller: Subset::EMPTY, larger: Subset::full(2) })
        );
    }

    #[test]
    fn union_of_pieces() {
        let u1 = make_uniform(g(2), 1).unwrap();
        let u2 = make_uniform(g(2), 1).unwrap();
        let m = make_union(g(4), vec![(Subset::from_iter([0, 1]), u1), (Subset::from_iter([2, 3]), u2)]).unwrap();
        assert_eq!(m.rank(Subset::full(4)), 2);
        assert!(verify_matroid_axioms(&m).unwrap().holds());
        let free = make_union(g(2), vec![(Subset::full(2), make_free(g(2)))]).unwrap();
        assert!(free.independent(Subset::full(2)));
    }

    #[test]
    fn rank_is_submodular() {
        let m = make_graphic(Graph::complete(4)).unwrap();
        let m2 = m.clone();
        let r = SubmodularOracle::new(m.ground().clone(), "rank", Flags::ALL, move |s| int(m2.rank(s) as i64));
        assert!(validate_submodular(&r).unwrap().holds());
    }
}
