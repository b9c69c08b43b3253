//! Simulation laboratory for the distance-from-start profiles of random
//! walks on combinatorial structures: the hypercube walk, random and
//! adjacent transpositions on the symmetric group, the walk on a random
//! 3-regular configuration-model graph, and the Gilbert-Shannon-Reeds
//! riffle shuffle. Each walk comes with a numerical evaluator for its
//! theoretical limit curve so simulation and theory can be compared at
//! desk scale.

pub mod cubic_graph;
pub mod error;
pub mod limit_curves;
pub mod perm;
pub mod stats;
pub mod walkers;

pub use error::{Error, Result};
