//! Gate synthesis: choose EOM depths/phases and shaper phases that maximize
//! two-photon success probability while keeping fidelity above a floor.
//!
//! The constraint is handled with an exterior quadratic penalty whose weight
//! grows tenfold per round; each round is an L-BFGS run on central-difference
//! gradients. Restarts are independent and each owns the RNG stream
//! `(seed, restart index)`, so results are bit-reproducible.

mod evaluate;
pub mod lbfgs;
mod problem;
mod search;

pub use evaluate::{objective, Evaluator};
pub use problem::{
    DesignProblem, DesignResult, DesignStatus, ElementKind, OptimizerConfig, Topology, TraceEntry,
};
pub use search::{optimize, placement_search};
