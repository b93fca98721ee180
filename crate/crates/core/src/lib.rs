//! Costly evidence acquisition by a law enforcer facing a biased decision maker.
//!
//! Beliefs are probabilities of guilt. The enforcer designs costly evidence,
//! the decision maker convicts once her posterior reaches a threshold, and
//! either party may hold a biased prior.

pub mod analysis;
pub mod belief;
pub mod cost;
pub mod error;
pub mod numdiff;
pub mod preference;
pub mod roots;
pub mod sim;
pub mod solver;
pub mod verify;

pub use belief::{reprior, Belief, BELIEF_TOL};
pub use cost::{CostFamily, CostSpec};
pub use error::{Error, ErrorKind, Result};
pub use solver::{solve_static, Regime, StaticProblem, StaticSolution};
