//! Maximum flows that lose as little as possible when an adversary destroys
//! `k` arcs and the surviving flow is rerouted within its own arc values.
//!
//! The solver expands every k-arc attack into its own block of an exact
//! linear program ([`model`]), solves it with an exact rational simplex
//! ([`simplex`]), and certifies the result with an exhaustive attacker
//! ([`attack`]).

pub mod attack;
pub mod cli;
pub mod error;
pub mod instances;
pub mod maxflow;
pub mod model;
pub mod network;
pub mod rational;
pub mod report;
pub mod scenario;
pub mod simplex;

pub use error::{Error, Result};
pub use network::{ArcId, ArcSet, Flow, InputFormat, Network};
pub use rational::Rational;
