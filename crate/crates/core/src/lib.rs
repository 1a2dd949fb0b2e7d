//! Two-player turn-based stochastic games with total reward where the
//! minimizing player must play fairly.
//!
//! The crate checks stopping under fairness, computes values by
//! greatest-fixed-point value iteration, synthesizes optimal
//! deterministic memoryless strategies, and ships a brute-force oracle,
//! a Monte Carlo simulator, a small guarded-command modeling language
//! and generators for two parametric case studies.

pub mod casegen;
pub mod corpus;
pub mod fairness;
pub mod game;
pub mod graph;
pub mod jsonfmt;
pub mod modelc;
pub mod oracle;
pub mod sim;
pub mod solver;

pub use fairness::{almost_sure_vertices, is_stopping_under_fairness, StoppingReport};
pub use game::{
    DetMemorylessStrategy, GameGraph, InducedChain, InducedMdp, MemorylessStrategy, PlayerClass,
    RandMemorylessStrategy, ValueVector, VertexId, VertexSet,
};
pub use solver::{solve, Solution, SolveError, SolveOptions};
