//! Susceptible/infected epidemic game.
//!
//! States are `S = 0`, `I = 1`; actions are going out `U = 0` and social
//! distancing `D = 1`. The distancing cost is charged on the chosen action.

use rand::{Rng, RngCore};

use crate::env::Environment;
use crate::error::{invalid, Result};
use crate::types::{Distribution, HorizonSpec};

pub const SUSCEPTIBLE: usize = 0;
pub const INFECTED: usize = 1;
pub const GO_OUT: usize = 0;
pub const DISTANCE: usize = 1;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SisParams {
    pub n_t: usize,
    /// `p(S | I, ., mu)`.
    pub recovery: f64,
    /// `p(I | S, U, mu) = infection * mu(I)`.
    pub infection: f64,
    pub infected_cost: f64,
    pub distancing_cost: f64,
    /// Infected share of `m_0`.
    pub initial_infected: f64,
}

impl Default for SisParams {
    fn default() -> Self {
        Self {
            n_t: 50,
            recovery: 0.3,
            infection: 0.9 * 0.9,
            infected_cost: 1.0,
            distancing_cost: 0.5,
            initial_infected: 0.4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SisEnv {
    params: SisParams,
    horizon: HorizonSpec,
}

pub fn sis_env(params: SisParams) -> Result<SisEnv> {
    let horizon = HorizonSpec::steps(params.n_t)?;
    for (name, v) in
        [("recovery", params.recovery), ("infection", params.infection), ("initial_infected", params.initial_infected)]
    {
        if !(0.0..=1.0).contains(&v) {
            return Err(invalid(name, format!("must lie in [0, 1], got {v}")));
        }
    }
    Ok(SisEnv { params, horizon })
}

impl SisEnv {
    /// `(p(S), p(I))` of the next state.
    fn next_row(&self, x: usize, a: usize, mu: &Distribution) -> [f64; 2] {
        match (x, a) {
            (INFECTED, _) => [self.params.recovery, 1.0 - self.params.recovery],
            (_, DISTANCE) => [1.0, 0.0],
            _ => {
                let p = self.params.infection * mu.get(INFECTED);
                [1.0 - p, p]
            }
        }
    }
}

impl Environment for SisEnv {
    fn name(&self) -> &str {
        "sis"
    }

    fn num_states(&self) -> usize {
        2
    }

    fn num_actions(&self) -> usize {
        2
    }

    fn horizon(&self) -> HorizonSpec {
        self.horizon
    }

    fn initial_distribution(&self) -> Distribution {
        let i = self.params.initial_infected;
        Distribution::new(vec![1.0 - i, i]).expect("validated share")
    }

    fn transition(&self, _n: usize, x: usize, a: usize, mu: &Distribution) -> Distribution {
        Distribution::new(self.next_row(x, a, mu).to_vec()).expect("probability in [0, 1]")
    }

    fn reward(&self, _n: usize, x: usize, a: usize, _mu: &Distribution) -> f64 {
        let mut r = 0.0;
        if x == INFECTED {
            r -= self.params.infected_cost;
        }
        if a == DISTANCE {
            r -= self.params.distancing_cost;
        }
        r
    }

    fn sample_next(&self, _n: usize, x: usize, a: usize, mu: &Distribution, rng: &mut dyn RngCore) -> usize {
        let u: f64 = rng.random();
        if u < self.next_row(x, a, mu)[INFECTED] {
            INFECTED
        } else {
            SUSCEPTIBLE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::forward_distribution;
    use crate::types::Policy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn env() -> SisEnv {
        sis_env(SisParams::default()).unwrap()
    }

    #[test]
    fn quoted_probabilities_hold_for_all_mu() {
        let e = env();
        for i in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mu = Distribution::new(vec![1.0 - i, i]).unwrap();
            assert_eq!(e.transition(0, INFECTED, DISTANCE, &mu).get(SUSCEPTIBLE), 0.3);
            assert_eq!(e.transition(0, INFECTED, GO_OUT, &mu).get(SUSCEPTIBLE), 0.3);
            assert_eq!(e.transition(0, SUSCEPTIBLE, GO_OUT, &mu).get(INFECTED), 0.81 * i);
            assert_eq!(e.transition(0, SUSCEPTIBLE, DISTANCE, &mu).get(INFECTED), 0.0);
        }
    }

    #[test]
    fn infected_distancing_row() {
        let row = env().transition(3, INFECTED, DISTANCE, &Distribution::uniform(2));
        assert!((row.get(SUSCEPTIBLE) - 0.3).abs() < 1e-15);
        assert!((row.get(INFECTED) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn nobody_infected_means_nobody_catches_it() {
        let row = env().transition(0, SUSCEPTIBLE, GO_OUT, &Distribution::point(2, SUSCEPTIBLE));
        assert_eq!(row.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn reward_values() {
        let e = env();
        let mu = Distribution::uniform(2);
        assert_eq!(e.reward(0, INFECTED, DISTANCE, &mu), -1.5);
        assert_eq!(e.reward(0, SUSCEPTIBLE, GO_OUT, &mu), 0.0);
        assert_eq!(e.reward(0, INFECTED, GO_OUT, &mu), -1.0);
        assert_eq!(e.reward(0, SUSCEPTIBLE, DISTANCE, &mu), -0.5);
    }

    #[test]
    fn all_susceptible_population_stays_healthy_when_distancing() {
        let e = sis_env(SisParams { initial_infected: 0.0, ..Default::default() }).unwrap();
        let pi = Policy::deterministic(e.table_shape(), |_, _| DISTANCE);
        let flow = forward_distribution(&pi, &e).unwrap();
        assert!(flow.iter().all(|d| d.get(SUSCEPTIBLE) == 1.0));
    }

    #[test]
    fn sampling_matches_rows() {
        let e = env();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mu = Distribution::new(vec![0.3, 0.7]).unwrap();
        let draws = 100_000;
        for x in 0..2 {
            for a in 0..2 {
                let row = e.transition(0, x, a, &mu);
                let hits = (0..draws).filter(|_| e.sample_next(0, x, a, &mu, &mut rng) == INFECTED).count();
                let freq = hits as f64 / draws as f64;
                // total variation on two points is |freq - p|
                assert!((freq - row.get(INFECTED)).abs() <= 0.02);
            }
        }
    }

    #[test]
    fn rejects_bad_probabilities() {
        assert!(sis_env(SisParams { recovery: 1.5, ..Default::default() }).is_err());
    }
}
