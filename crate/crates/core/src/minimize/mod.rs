//! Covering-LP relaxations and the rounding algorithms built on them.

mod fer;
mod kalpha;
mod lp;
mod msca;
mod rounding;

pub use fer::*;
pub use kalpha::*;
pub use lp::*;
pub use msca::*;
pub use rounding::*;

/// Ring-constrained minimization belongs to the same surface.
pub use crate::sfm::sfm_mv_ring as sfm_ring_constrained_min;
