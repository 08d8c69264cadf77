//! Feasibility-constrained adversarial robust RL as a two-player zero-sum
//! game.
//!
//! The adversary picks environment parameters, the protagonist picks
//! policies, and parameters on which no policy reaches a return threshold
//! `lambda` cost the adversary a large penalty `C`. Games are solved with
//! policy-space response oracles (PSRO) over tabular environments, next to
//! minimax, regret and domain-randomization baselines.
//!
//! Module map:
//!
//! - [`normform`]: matrix games, fictitious play, exploitability, the
//!   penalty transform and dominance elimination.
//! - [`upomdp`]: parameterized environments, rollouts, utility estimates.
//! - [`envs`]: Lava World, WindyWalk and the cabinet matrix game.
//! - [`br`]: exact and Q-learning best responses.
//! - [`feasibility`]: feasible sets and worst-case feasible evaluation.
//! - [`psro`]: the PSRO loop and the baselines.
//! - [`harness`]: experiment configs, batch runs and CSV output.

pub mod br;
pub mod envs;
pub mod error;
pub mod feasibility;
pub mod harness;
pub mod normform;
pub mod psro;
pub mod rng;
pub mod upomdp;

pub use error::{FarrError, Result};
pub use rng::Seed;
