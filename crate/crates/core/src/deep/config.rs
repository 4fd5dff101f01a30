use super::encoding::Encoding;
use crate::error::{invalid, Result};
use crate::neural::OptimizerKind;

/// Network and training-loop settings shared by the deep solvers.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeepConfig {
    /// Hidden layer widths; empty gives a linear network.
    pub hidden: Vec<usize>,
    pub encoding: Encoding,
    pub optimizer: OptimizerKind,
    pub replay_capacity: usize,
    pub reservoir_capacity: usize,
    /// Gradient steps between hard copies into the target network.
    pub target_update: usize,
    /// Gradient steps between two sampled episodes.
    pub episode_interval: usize,
    /// Episodes rolled with each best response into the reservoir (`N_samples`).
    pub avg_episodes: usize,
    /// Cross-entropy steps on the average-policy network per iteration.
    pub avg_steps: usize,
    /// Start output layers at zero, so initial softmax policies are uniform.
    pub zero_init_output: bool,
    /// Continue training the previous iteration's network instead of a fresh one.
    pub warm_start: bool,
    /// Replace minibatches by every `(n, x, a)` with this many sampled
    /// successors each, weighted by their counts.
    pub exhaustive_draws: Option<usize>,
    /// Stop an exhaustive inner loop once the loss is below this and a target
    /// refresh no longer moves the targets.
    pub loss_tolerance: Option<f64>,
}

impl Default for DeepConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 64],
            encoding: Encoding::StateTime,
            optimizer: OptimizerKind::Adam,
            replay_capacity: 100_000,
            reservoir_capacity: 2_000_000,
            target_update: 200,
            episode_interval: 1,
            avg_episodes: 10,
            avg_steps: 500,
            zero_init_output: true,
            warm_start: true,
            exhaustive_draws: None,
            loss_tolerance: None,
        }
    }
}

impl DeepConfig {
    /// One-hot `(n, x)` inputs into a linear head, trained by full-batch
    /// gradient descent over every `(n, x, a)`.
    pub fn tabular(draws: usize) -> Self {
        Self {
            hidden: Vec::new(),
            encoding: Encoding::Joint,
            optimizer: OptimizerKind::Sgd,
            exhaustive_draws: Some(draws),
            loss_tolerance: Some(1e-10),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden.contains(&0) {
            return Err(invalid("hidden", "layer widths must be positive"));
        }
        for (name, v) in [
            ("replay_capacity", self.replay_capacity),
            ("reservoir_capacity", self.reservoir_capacity),
            ("target_update", self.target_update),
            ("episode_interval", self.episode_interval),
        ] {
            if v == 0 {
                return Err(invalid(name, "must be at least 1"));
            }
        }
        if self.exhaustive_draws == Some(0) {
            return Err(invalid("exhaustive_draws", "must be at least 1"));
        }
        Ok(())
    }

    pub fn layer_sizes(&self, input: usize, actions: usize) -> Vec<usize> {
        let mut sizes = Vec::with_capacity(self.hidden.len() + 2);
        sizes.push(input);
        sizes.extend(&self.hidden);
        sizes.push(actions);
        sizes
    }
}
