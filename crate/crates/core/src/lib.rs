//! Finite-horizon mean field games: exact tabular solvers, deep-RL
//! approximations of the same iterations, benchmark environments and an
//! experiment harness.

pub mod deep;
pub mod dynamics;
pub mod env;
pub mod envs;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod neural;
pub mod softmax;
pub mod types;

pub use env::Environment;
pub use error::{Error, Result};
pub use types::{
    Distribution, EpsilonSchedule, HorizonSpec, MeanFieldFlow, Policy, QKind, QTable, SolverParams, TableShape,
};
