use rand::{Rng, RngCore};

use crate::types::{Distribution, HorizonSpec, TableShape};

/// A finite-horizon, finite-state mean field game.
///
/// `transition` and `reward` take the population distribution at the current
/// time; `sample_next` is the only access a model-free learner gets to the
/// dynamics.
pub trait Environment: Send + Sync {
    fn name(&self) -> &str;

    fn num_states(&self) -> usize;

    fn num_actions(&self) -> usize;

    fn horizon(&self) -> HorizonSpec;

    /// `m_0`.
    fn initial_distribution(&self) -> Distribution;

    /// The row `p_n(. | x, a, mu_n)`.
    fn transition(&self, n: usize, x: usize, a: usize, mu: &Distribution) -> Distribution;

    fn reward(&self, n: usize, x: usize, a: usize, mu: &Distribution) -> f64;

    /// One draw from `transition(n, x, a, mu)`.
    fn sample_next(&self, n: usize, x: usize, a: usize, mu: &Distribution, rng: &mut dyn RngCore) -> usize {
        let u: f64 = rng.random();
        self.transition(n, x, a, mu).sample_with(u)
    }

    /// Number of populations sharing the state space (1 for ordinary games).
    fn num_populations(&self) -> usize {
        1
    }

    /// Population owning state `x`. Populations never change under transitions.
    fn population_of(&self, _x: usize) -> usize {
        0
    }

    fn table_shape(&self) -> TableShape {
        TableShape::new(self.horizon().len(), self.num_states(), self.num_actions())
    }
}
