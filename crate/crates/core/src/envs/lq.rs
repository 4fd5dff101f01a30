//! Discretized linear-quadratic game on a 1-d lattice.
//!
//! `x_{n+1} = clamp(x_n + a_n dt + sigma eps_n sqrt(dt))` with `eps_n` on a
//! small integer support weighted by the standard normal density. Positions
//! are lattice indices; `m_bar_n` is the first moment of `mu_n`.

use crate::env::Environment;
use crate::error::{invalid, Result};
use crate::types::{Distribution, HorizonSpec};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LqParams {
    pub n_t: usize,
    pub sigma: f64,
    pub dt: f64,
    pub q_coef: f64,
    pub kappa: f64,
    pub c_term: f64,
    pub num_states: usize,
    /// Action values (lattice moves per unit time).
    pub actions: Vec<i64>,
    /// Integer support of the noise.
    pub noise_support: Vec<i64>,
}

impl Default for LqParams {
    fn default() -> Self {
        Self {
            n_t: 10,
            sigma: 1.0,
            dt: 1.0,
            q_coef: 0.01,
            kappa: 0.5,
            c_term: 1.0,
            num_states: 100,
            actions: (-3..=3).collect(),
            noise_support: (-3..=3).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LqEnv {
    params: LqParams,
    horizon: HorizonSpec,
    noise: Vec<(f64, f64)>,
}

pub fn lq_env(params: LqParams) -> Result<LqEnv> {
    let horizon = HorizonSpec::new(params.n_t, params.dt)?;
    if params.num_states < 2 {
        return Err(invalid("num_states", "need at least two lattice points"));
    }
    if params.actions.is_empty() || params.noise_support.is_empty() {
        return Err(invalid("actions", "action set and noise support must be non-empty"));
    }
    if !(params.sigma >= 0.0) {
        return Err(invalid("sigma", "must be non-negative"));
    }
    let density: Vec<f64> = params.noise_support.iter().map(|&k| (-0.5 * (k as f64).powi(2)).exp()).collect();
    let z: f64 = density.iter().sum();
    let noise = params.noise_support.iter().zip(density).map(|(&k, d)| (k as f64, d / z)).collect();
    Ok(LqEnv { params, horizon, noise })
}

impl LqEnv {
    pub fn params(&self) -> &LqParams {
        &self.params
    }

    /// `(offset, weight)` pairs of the discretized noise.
    pub fn noise_weights(&self) -> &[(f64, f64)] {
        &self.noise
    }

    fn clamp(&self, pos: f64) -> usize {
        pos.round().clamp(0.0, (self.params.num_states - 1) as f64) as usize
    }
}

impl Environment for LqEnv {
    fn name(&self) -> &str {
        "lq"
    }

    fn num_states(&self) -> usize {
        self.params.num_states
    }

    fn num_actions(&self) -> usize {
        self.params.actions.len()
    }

    fn horizon(&self) -> HorizonSpec {
        self.horizon
    }

    fn initial_distribution(&self) -> Distribution {
        Distribution::uniform(self.params.num_states)
    }

    fn transition(&self, _n: usize, x: usize, a: usize, _mu: &Distribution) -> Distribution {
        let p = &self.params;
        let drift = x as f64 + p.actions[a] as f64 * p.dt;
        let scale = p.sigma * p.dt.sqrt();
        let mut row = vec![0.0; p.num_states];
        for &(k, w) in &self.noise {
            row[self.clamp(drift + scale * k)] += w;
        }
        Distribution::new(row).expect("noise weights are normalized")
    }

    fn reward(&self, n: usize, x: usize, a: usize, mu: &Distribution) -> f64 {
        let p = &self.params;
        let gap = mu.mean_index() - x as f64;
        if n == self.horizon.n_t() {
            return -0.5 * p.c_term * gap * gap;
        }
        let act = p.actions[a] as f64;
        (-0.5 * act * act + p.q_coef * act * gap - 0.5 * p.kappa * gap * gap) * p.dt
    }
}
