//! Seeded fixtures shared by the criterion benches.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use submod_core::blockers::BlockingFamily;
use submod_core::lifting::{AgentFamily, BaseFamily};
use submod_core::matroids::make_uniform;
use submod_core::oracles::{MultivariateOracle, SubmodularOracle};
use submod_core::random::{random_graph, random_monotone, random_multivariate, random_submodular};
use submod_core::{GroundSet, Subset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A non-monotone submodular function for minimization.
pub fn sfm_instance(n: usize, seed: u64) -> SubmodularOracle {
    random_submodular(&mut rng(seed), GroundSet::indexed(n))
}

/// Vertex cover on G(n, 1/2) with `k` monotone agents.
pub struct CoverInstance {
    pub family: BlockingFamily,
    pub agents: Vec<SubmodularOracle>,
}

pub fn cover_instance(n: usize, k: usize, seed: u64) -> CoverInstance {
    let mut r = rng(seed);
    let family = BlockingFamily::vertex_cover(&random_graph(&mut r, n, 0.5)).expect("graph on n vertices");
    let agents = (0..k).map(|_| random_monotone(&mut r, GroundSet::indexed(n))).collect();
    CoverInstance { family, agents }
}

/// Welfare under a uniform matroid of rank n/2 with free agents.
pub struct WelfareInstance {
    pub objective: MultivariateOracle,
    pub family: BaseFamily,
    pub agents: Vec<AgentFamily>,
}

pub fn welfare_instance(n: usize, k: usize, seed: u64) -> WelfareInstance {
    let mut r = rng(seed);
    let ground = GroundSet::indexed(n);
    let objective = random_multivariate(&mut r, ground.clone(), k);
    let family = BaseFamily::Matroid(make_uniform(ground.clone(), n.div_ceil(2)).expect("rank ≤ n"));
    WelfareInstance { objective, family, agents: vec![AgentFamily::free(ground); k] }
}

/// Agents with random regions that always include a planted perfect assignment.
pub struct AllocationInstance {
    pub agents: Vec<SubmodularOracle>,
    pub regions: Vec<Subset>,
    pub caps: Vec<usize>,
}

pub fn allocation_instance(n: usize, seed: u64) -> AllocationInstance {
    let mut r = rng(seed);
    let agents = (0..n).map(|_| random_monotone(&mut r, GroundSet::indexed(n))).collect();
    let regions = (0..n).map(|i| (0..n).filter(|_| r.gen_bool(0.5)).fold(Subset::singleton(i), Subset::with)).collect();
    AllocationInstance { agents, regions, caps: vec![1; n] }
}
