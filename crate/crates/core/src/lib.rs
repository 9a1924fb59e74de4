//! Degree-price network creation games.
//!
//! Agents are the nodes of an undirected network and buy edges; the owner of
//! edge `{u, v}` pays a price linear in `v`'s degree and every agent pays the
//! sum of its hop distances. This crate evaluates costs, computes best
//! responses, verifies (k-local) equilibria, runs improving-response
//! dynamics and provides brute-force oracles for small instances.

pub mod best_response;
pub mod constructions;
pub mod cost;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod moves;
pub mod oracle;
pub mod par;

pub use best_response::{best_response_exact, BestResponse};
pub use cost::{
    agent_cost, rho, social_cost, Cost, CostBreakdown, GameConfig, Locality, Price, Rational,
    Variant,
};
pub use equilibrium::{verify_equilibrium, CheckLevel, EquilibriumReport};
pub use error::{Error, Result};
pub use graph::{Node, OwnedGraph, UNREACHABLE};
pub use moves::{candidate_targets, enumerate_single_moves, MoveKind, MoveRecord};
pub use par::Execution;
