//! Decision engine for defending a blockchain network against a majority
//! attacker by reserving a strategic alliance of genuine miner nodes.
//!
//! The crate answers two operator questions: how many alliance members to
//! reserve, and when the request must be made. It provides
//!
//! - exact lattice first-passage laws for the attacker's block count
//!   ([`stochastic`]),
//! - the first-excess operator calculus used to state and spot-check the
//!   analytic functional identities ([`fluctuation`]),
//! - the decision-parameter layer: exit-index mean, decision moment, block
//!   marginals and burst probabilities ([`decision`]),
//! - the mixed-strategy cost game and alliance-size optimizer ([`game`]),
//! - an event-level Monte Carlo oracle with a documented deterministic
//!   generator that validates every analytic quantity ([`sim`]).
//!
//! With the default `parallel` feature, Monte Carlo replications and cost
//! sweeps fan out over a rayon pool; results are bit-identical across
//! parallelism levels because every reduction is performed in replication
//! order.

pub mod decision;
pub mod error;
pub mod fluctuation;
pub mod game;
pub mod numerics;
pub mod scenario;
pub mod sim;
pub mod stochastic;

pub use error::{ModelError, Result};
pub use scenario::Scenario;
