//! Exact-arithmetic submodular optimization.
//!
//! Single-agent, multi-agent and multivariate problems share one representation:
//! a tuple (S_1, …, S_k) over ground set V is the subset {(i, v) : v ∈ S_i} of the
//! lifted ground set [k]×V, with (i, v) stored at index i·n + v.

pub mod blockers;
pub mod brute;
pub mod error;
pub mod flow;
pub mod graph;
pub mod lifting;
pub mod matroids;
pub mod maximize;
pub mod minimize;
pub mod oracles;
pub mod random;
pub mod rational;
pub mod sfm;
pub mod simplex;
pub mod solution;
pub mod subset;

pub use error::{Error, Result};
pub use rational::Rational;
pub use solution::MultiAgentSolution;
pub use subset::{GroundSet, SetTuple, Subset};
