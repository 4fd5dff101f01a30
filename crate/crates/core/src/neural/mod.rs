//! Small feedforward networks with hand-written backpropagation, first-order
//! optimizers, and the replay and reservoir buffers used by the deep solvers.

pub mod buffer;
pub mod io;
pub mod loss;
pub mod mlp;
pub mod optim;

pub use buffer::{reservoir_offer, ReplayBuffer, ReservoirBuffer, Transition};
pub use loss::{grad_cross_entropy, grad_squared_loss, Labeled, Regression};
pub use mlp::{Gradient, Mlp};
pub use optim::{optimizer_step, OptimizerKind, OptimizerState};
