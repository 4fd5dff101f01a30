//! Benchmark games.

pub mod grid;
pub mod lq;
pub mod multipop;
pub mod sis;
pub mod toy;

pub use grid::{four_rooms_env, maze_env, GridEnv, GridReward, GridSpec};
pub use lq::{lq_env, LqEnv, LqParams};
pub use multipop::{multipop_env, MultiPopEnv, MultiPopParams};
pub use sis::{sis_env, SisEnv, SisParams};
pub use toy::toy_env;

use crate::env::Environment;
use crate::types::{Distribution, HorizonSpec};

type TransitionFn = dyn Fn(usize, usize, usize, &Distribution) -> Vec<f64> + Send + Sync;
type RewardFn = dyn Fn(usize, usize, usize, &Distribution) -> f64 + Send + Sync;

/// A game given by plain closures for its transition rows and rewards.
pub struct TabularGame {
    name: String,
    horizon: HorizonSpec,
    states: usize,
    actions: usize,
    m0: Distribution,
    transition: Box<TransitionFn>,
    reward: Box<RewardFn>,
}

impl TabularGame {
    pub fn new(
        name: impl Into<String>,
        horizon: HorizonSpec,
        states: usize,
        actions: usize,
        m0: Distribution,
        transition: impl Fn(usize, usize, usize, &Distribution) -> Vec<f64> + Send + Sync + 'static,
        reward: impl Fn(usize, usize, usize, &Distribution) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(m0.len(), states, "initial distribution does not cover the state set");
        Self {
            name: name.into(),
            horizon,
            states,
            actions,
            m0,
            transition: Box::new(transition),
            reward: Box::new(reward),
        }
    }
}

impl Environment for TabularGame {
    fn name(&self) -> &str {
        &self.name
    }

    fn num_states(&self) -> usize {
        self.states
    }

    fn num_actions(&self) -> usize {
        self.actions
    }

    fn horizon(&self) -> HorizonSpec {
        self.horizon
    }

    fn initial_distribution(&self) -> Distribution {
        self.m0.clone()
    }

    fn transition(&self, n: usize, x: usize, a: usize, mu: &Distribution) -> Distribution {
        Distribution::new((self.transition)(n, x, a, mu)).expect("transition row is a distribution")
    }

    fn reward(&self, n: usize, x: usize, a: usize, mu: &Distribution) -> f64 {
        (self.reward)(n, x, a, mu)
    }
}

/// Wraps a game and adds `bonus(n, x, a)` to its reward.
pub struct ShiftedReward<'a, F> {
    inner: &'a dyn Environment,
    bonus: F,
}

impl<'a, F> ShiftedReward<'a, F>
where
    F: Fn(usize, usize, usize) -> f64 + Send + Sync,
{
    pub fn new(inner: &'a dyn Environment, bonus: F) -> Self {
        Self { inner, bonus }
    }
}

impl<F> Environment for ShiftedReward<'_, F>
where
    F: Fn(usize, usize, usize) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }
    fn num_actions(&self) -> usize {
        self.inner.num_actions()
    }
    fn horizon(&self) -> HorizonSpec {
        self.inner.horizon()
    }
    fn initial_distribution(&self) -> Distribution {
        self.inner.initial_distribution()
    }
    fn transition(&self, n: usize, x: usize, a: usize, mu: &Distribution) -> Distribution {
        self.inner.transition(n, x, a, mu)
    }
    fn reward(&self, n: usize, x: usize, a: usize, mu: &Distribution) -> f64 {
        self.inner.reward(n, x, a, mu) + (self.bonus)(n, x, a)
    }
    fn num_populations(&self) -> usize {
        self.inner.num_populations()
    }
    fn population_of(&self, x: usize) -> usize {
        self.inner.population_of(x)
    }
}

/// The game with its action set collapsed to action 0 of `inner`.
pub struct SingleAction<'a> {
    inner: &'a dyn Environment,
}

impl<'a> SingleAction<'a> {
    pub fn new(inner: &'a dyn Environment) -> Self {
        Self { inner }
    }
}

impl Environment for SingleAction<'_> {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }
    fn num_actions(&self) -> usize {
        1
    }
    fn horizon(&self) -> HorizonSpec {
        self.inner.horizon()
    }
    fn initial_distribution(&self) -> Distribution {
        self.inner.initial_distribution()
    }
    fn transition(&self, n: usize, x: usize, _a: usize, mu: &Distribution) -> Distribution {
        self.inner.transition(n, x, 0, mu)
    }
    fn reward(&self, n: usize, x: usize, _a: usize, mu: &Distribution) -> f64 {
        self.inner.reward(n, x, 0, mu)
    }
    fn num_populations(&self) -> usize {
        self.inner.num_populations()
    }
    fn population_of(&self, x: usize) -> usize {
        self.inner.population_of(x)
    }
}
