use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::config::DeepConfig;
use super::encoding::Encoder;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::neural::mlp::ForwardCache;
use crate::neural::{grad_squared_loss, Mlp, OptimizerState, Regression, ReplayBuffer, Transition};
use crate::softmax::argmax;
use crate::types::{floored_ln, MeanFieldFlow, Policy, QKind, QTable, SolverParams, TableShape};

/// Random number generator driving every deep solver.
pub type SolverRng = ChaCha8Rng;

/// Regression target for `Q((n, x), a)` given a transition and the target
/// network's values at `(n + 1, x')`.
#[derive(Debug, Clone, Copy)]
pub enum TargetRule<'a> {
    /// `r + max_b Q(n+1, x', b)`.
    Optimal,
    /// `r + sum_b pi(b|n+1, x') Q(n+1, x', b)`.
    Evaluation(&'a Policy),
    /// `r + alpha tau ln pi(a|n, x)
    ///    + sum_b pi(b|n+1, x') [Q(n+1, x', b) - tau ln pi(b|n+1, x')]`.
    Munchausen { prev: &'a Policy, tau: f64, alpha: f64 },
}

impl TargetRule<'_> {
    fn target(&self, t: &Transition, next_q: &[f64]) -> f64 {
        let mut y = t.r;
        if let TargetRule::Munchausen { prev, tau, alpha } = self {
            y += alpha * tau * floored_ln(prev.prob(t.n, t.x, t.a));
        }
        if t.terminal {
            return y;
        }
        let n = t.n + 1;
        y + match self {
            TargetRule::Optimal => next_q.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            TargetRule::Evaluation(pi) => pi.row(n, t.x_next).iter().zip(next_q).map(|(p, q)| p * q).sum(),
            TargetRule::Munchausen { prev, tau, .. } => {
                prev.row(n, t.x_next).iter().zip(next_q).map(|(p, q)| p * (q - tau * floored_ln(*p))).sum()
            }
        }
    }
}

/// Targets of `rule` for every transition, bootstrapping from `target_net`.
pub fn compute_targets(rule: &TargetRule<'_>, batch: &[Transition], target_net: &Mlp, encoder: &Encoder) -> Vec<f64> {
    let mut cache = ForwardCache::default();
    batch
        .iter()
        .map(|t| {
            if t.terminal {
                rule.target(t, &[])
            } else {
                target_net.forward_cached(encoder.input(t.n + 1, t.x_next), &mut cache);
                rule.target(t, cache.output())
            }
        })
        .collect()
}

/// The Munchausen regression target of each transition.
pub fn munchausen_target(
    batch: &[Transition],
    policy_prev: &Policy,
    target_net: &Mlp,
    encoder: &Encoder,
    tau: f64,
    alpha: f64,
) -> Vec<f64> {
    let rule = TargetRule::Munchausen { prev: policy_prev, tau, alpha };
    compute_targets(&rule, batch, target_net, encoder)
}

/// Network outputs at every `(n, x)`.
pub fn q_table(net: &Mlp, encoder: &Encoder, shape: TableShape) -> Result<QTable> {
    let mut values = Vec::with_capacity(shape.len());
    let mut cache = ForwardCache::default();
    for n in 0..shape.steps {
        for x in 0..shape.states {
            net.forward_cached(encoder.input(n, x), &mut cache);
            values.extend_from_slice(cache.output());
        }
    }
    QTable::new(shape, values, QKind::Plain)
}

/// Draws from a policy row.
pub(crate) fn sample_action(row: &[f64], rng: &mut SolverRng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    row.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Samples one episode from `x_0 ~ m_0` to `N_T`, choosing actions with
/// `act(n, x, rng)` and successors with `sample_next` under `mu`.
pub(crate) fn roll_episode(
    env: &dyn Environment,
    mu: &MeanFieldFlow,
    rng: &mut SolverRng,
    mut act: impl FnMut(usize, usize, &mut SolverRng) -> usize,
    mut visit: impl FnMut(Transition),
) {
    let n_t = env.horizon().n_t();
    let m0 = env.initial_distribution();
    let mut x = m0.sample_with(rng.random());
    for n in 0..=n_t {
        let a = act(n, x, rng);
        let mu_n = mu.at(n);
        let r = env.reward(n, x, a, mu_n);
        let terminal = n == n_t;
        let x_next = if terminal { x } else { env.sample_next(n, x, a, mu_n, rng) };
        visit(Transition { n, x, a, r, x_next, terminal });
        x = x_next;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitStats {
    pub steps: usize,
    pub final_loss: f64,
}

/// One inner loop of value regression with a periodically refreshed target
/// network.
pub(crate) struct QFitter<'a> {
    pub env: &'a dyn Environment,
    pub encoder: &'a Encoder,
    pub params: &'a SolverParams,
    pub deep: &'a DeepConfig,
}

impl QFitter<'_> {
    pub(crate) fn fit(
        &self,
        mu: &MeanFieldFlow,
        net: &mut Mlp,
        opt: &mut OptimizerState,
        rule: &TargetRule<'_>,
        rng: &mut SolverRng,
    ) -> Result<FitStats> {
        match self.deep.exhaustive_draws {
            Some(draws) => self.fit_exhaustive(mu, net, opt, rule, draws, rng),
            None => self.fit_sampled(mu, net, opt, rule, rng),
        }
    }

    fn fit_sampled(
        &self,
        mu: &MeanFieldFlow,
        net: &mut Mlp,
        opt: &mut OptimizerState,
        rule: &TargetRule<'_>,
        rng: &mut SolverRng,
    ) -> Result<FitStats> {
        let steps = self.params.inner_steps;
        let mut replay = ReplayBuffer::new(self.deep.replay_capacity);
        let mut target = net.clone();
        let mut cache = ForwardCache::default();
        let mut loss = f64::NAN;
        for step in 0..steps {
            if step % self.deep.episode_interval == 0 {
                let eps = self.params.epsilon.at(step, steps);
                let actions = self.env.num_actions();
                let current: &Mlp = net;
                let act = |n: usize, x: usize, rng: &mut SolverRng| {
                    if rng.random::<f64>() < eps {
                        rng.random_range(0..actions)
                    } else {
                        current.forward_cached(self.encoder.input(n, x), &mut cache);
                        argmax(cache.output())
                    }
                };
                roll_episode(self.env, mu, rng, act, |t| replay.push(t));
            }
            let batch = replay.sample(self.params.batch_size, rng);
            let targets = compute_targets(rule, &batch, &target, self.encoder);
            let samples: Vec<Regression<'_>> = batch
                .iter()
                .zip(&targets)
                .map(|(t, y)| Regression::new(self.encoder.input(t.n, t.x), t.a, *y))
                .collect();
            let (l, grad) = grad_squared_loss(net, &samples)?;
            loss = l;
            opt.step(net, &grad)?;
            if !net.is_finite() {
                return Err(Error::NonFinite(format!("network parameters after step {step}")));
            }
            if (step + 1) % self.deep.target_update == 0 {
                target.clone_from(net);
            }
        }
        Ok(FitStats { steps, final_loss: loss })
    }

    /// Every `(n, x, a)` with `draws` sampled successors, merged by count.
    fn exhaustive_data(&self, mu: &MeanFieldFlow, draws: usize, rng: &mut SolverRng) -> (Vec<Transition>, Vec<f64>) {
        let env = self.env;
        let n_t = env.horizon().n_t();
        let mut data = Vec::new();
        let mut weights = Vec::new();
        let mut counts = vec![0usize; env.num_states()];
        for n in 0..=n_t {
            let mu_n = mu.at(n);
            for x in 0..env.num_states() {
                for a in 0..env.num_actions() {
                    let r = env.reward(n, x, a, mu_n);
                    if n == n_t {
                        data.push(Transition { n, x, a, r, x_next: x, terminal: true });
                        weights.push(draws as f64);
                        continue;
                    }
                    counts.fill(0);
                    for _ in 0..draws {
                        counts[env.sample_next(n, x, a, mu_n, rng)] += 1;
                    }
                    for (y, &c) in counts.iter().enumerate().filter(|(_, c)| **c > 0) {
                        data.push(Transition { n, x, a, r, x_next: y, terminal: false });
                        weights.push(c as f64);
                    }
                }
            }
        }
        (data, weights)
    }

    fn fit_exhaustive(
        &self,
        mu: &MeanFieldFlow,
        net: &mut Mlp,
        opt: &mut OptimizerState,
        rule: &TargetRule<'_>,
        draws: usize,
        rng: &mut SolverRng,
    ) -> Result<FitStats> {
        let (data, weights) = self.exhaustive_data(mu, draws, rng);
        let mut target = net.clone();
        let mut targets = compute_targets(rule, &data, &target, self.encoder);
        let tol = self.deep.loss_tolerance;
        let mut loss = f64::NAN;
        let mut step = 0;
        while step < self.params.inner_steps {
            let samples: Vec<Regression<'_>> = data
                .iter()
                .zip(&targets)
                .zip(&weights)
                .map(|((t, y), w)| Regression {
                    input: self.encoder.input(t.n, t.x),
                    action: t.a,
                    target: *y,
                    weight: *w,
                })
                .collect();
            let (l, grad) = grad_squared_loss(net, &samples)?;
            loss = l;
            if let Some(tol) = tol {
                if loss < tol {
                    target.clone_from(net);
                    let fresh = compute_targets(rule, &data, &target, self.encoder);
                    let moved = fresh.iter().zip(&targets).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    targets = fresh;
                    if moved < tol.sqrt() {
                        break;
                    }
                    continue;
                }
            }
            opt.step(net, &grad)?;
            if !net.is_finite() {
                return Err(Error::NonFinite(format!("network parameters after step {step}")));
            }
            step += 1;
            if step % self.deep.target_update == 0 {
                target.clone_from(net);
                targets = compute_targets(rule, &data, &target, self.encoder);
            }
        }
        Ok(FitStats { steps: step, final_loss: loss })
    }
}
