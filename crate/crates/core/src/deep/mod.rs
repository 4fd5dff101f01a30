//! Model-free counterparts of the tabular iterations. Learners only see
//! transitions drawn with `sample_next`; population flows are still computed
//! exactly from the extracted policies.

pub mod config;
pub mod encoding;
pub mod solvers;
pub mod train;

pub use config::DeepConfig;
pub use encoding::{Encoder, Encoding};
pub use solvers::{d_afp, d_bi, d_bp, d_momd, d_pi, dqn_best_response};
pub use train::{compute_targets, munchausen_target, q_table, FitStats, SolverRng, TargetRule};
