//! Two firms compete for the consumption of agents on a social network by
//! splitting a budget between product quality and seeding influential agents.
//!
//! The crate covers the consumption dynamics on a weighted influence graph,
//! the resulting centralities and discounted utilities, the equilibrium of the
//! budget game, marginal allocation under preset qualities and the extreme
//! graphs for seeding.

pub mod allocation;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod extremal;
pub mod graph;
pub mod params;
pub mod reproduce;

pub use error::{Error, Result};
pub use graph::{centrality, generate, CentralityVector, GraphKind, SocialGraph};
pub use params::ModelParams;
