#![allow(dead_code)]

use mfg::dynamics::evaluate_policy;
use mfg::envs::ShiftedReward;
use mfg::types::floored_ln;
use mfg::{Distribution, Environment, MeanFieldFlow, Policy, QKind, QTable};

pub mod neural;

/// State distribution of a lone agent playing `pi` against the fixed flow
/// `mu`, started from `start` at time `from`.
pub fn agent_marginals(
    env: &dyn Environment,
    pi: &Policy,
    mu: &MeanFieldFlow,
    from: usize,
    start: Vec<f64>,
) -> Vec<Vec<f64>> {
    let n_t = env.horizon().n_t();
    let mut out = vec![start];
    for n in from..n_t {
        let m = out.last().unwrap();
        let mut next = vec![0.0; env.num_states()];
        for x in 0..env.num_states() {
            for a in 0..env.num_actions() {
                let w = m[x] * pi.prob(n, x, a);
                if w == 0.0 {
                    continue;
                }
                for (y, p) in env.transition(n, x, a, mu.at(n)).as_slice().iter().enumerate() {
                    next[y] += w * p;
                }
            }
        }
        out.push(next);
    }
    out
}

/// Expected reward from time `from` onwards, by forward propagation.
pub fn value_forward(env: &dyn Environment, pi: &Policy, mu: &MeanFieldFlow, from: usize, start: Vec<f64>) -> f64 {
    agent_marginals(env, pi, mu, from, start)
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let n = from + i;
            (0..env.num_states())
                .map(|x| {
                    (0..env.num_actions()).map(|a| m[x] * pi.prob(n, x, a) * env.reward(n, x, a, mu.at(n))).sum::<f64>()
                })
                .sum::<f64>()
        })
        .sum()
}

/// The induced flow, propagated directly from its definition.
pub fn mean_field(env: &dyn Environment, pi: &Policy) -> MeanFieldFlow {
    let mut flow = vec![env.initial_distribution()];
    for n in 0..env.horizon().n_t() {
        let m = flow.last().unwrap();
        let mut next = vec![0.0; env.num_states()];
        for x in 0..env.num_states() {
            for a in 0..env.num_actions() {
                for (y, p) in env.transition(n, x, a, m).as_slice().iter().enumerate() {
                    next[y] += m.get(x) * pi.prob(n, x, a) * p;
                }
            }
        }
        flow.push(Distribution::new(next).unwrap());
    }
    MeanFieldFlow::new(flow, env.horizon()).unwrap()
}

pub fn deterministic_policies(env: &dyn Environment) -> Vec<Policy> {
    let shape = env.table_shape();
    let slots = shape.steps * shape.states;
    let count = shape.actions.pow(slots as u32);
    (0..count)
        .map(|mut code| {
            let mut choice = vec![0; slots];
            for c in choice.iter_mut() {
                *c = code % shape.actions;
                code /= shape.actions;
            }
            Policy::deterministic(shape, |n, x| choice[n * shape.states + x])
        })
        .collect()
}

pub fn brute_q_star(env: &dyn Environment, mu: &MeanFieldFlow, all: &[Policy]) -> QTable {
    let shape = env.table_shape();
    let n_t = env.horizon().n_t();
    let mut q = QTable::zeros(shape, QKind::Plain);
    for n in 0..=n_t {
        for x in 0..shape.states {
            for a in 0..shape.actions {
                let r = env.reward(n, x, a, mu.at(n));
                let cont = if n == n_t {
                    0.0
                } else {
                    let next = env.transition(n, x, a, mu.at(n)).into_vec();
                    all.iter()
                        .map(|pi| value_forward(env, pi, mu, n + 1, next.clone()))
                        .fold(f64::NEG_INFINITY, f64::max)
                };
                q.row_mut(n, x)[a] = r + cont;
            }
        }
    }
    q
}

pub fn random_policy(env: &dyn Environment, seed: u64) -> Policy {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Policy::from_rows(env.table_shape(), |_, _, row| {
        for p in row.iter_mut() {
            *p = rng.random_range(0.01..1.0);
        }
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|p| *p /= s);
    })
    .unwrap()
}

/// Mirror descent written directly on the game with reward
/// `r - (1 - alpha) tau ln pi^k`, taking steps `pi <- pi exp(Q / tau)`.
pub fn penalized_mirror_descent(env: &dyn Environment, alpha: f64, tau: f64, iterations: usize) -> Vec<Policy> {
    let shape = env.table_shape();
    let mut pi = Policy::uniform(shape);
    let mut out = Vec::new();
    for _ in 0..iterations {
        let mu = mean_field(env, &pi);
        let prev = pi.clone();
        let weight = (1.0 - alpha) * tau;
        let penalized = ShiftedReward::new(env, move |n, x, a| -weight * floored_ln(prev.prob(n, x, a)));
        let q = evaluate_policy(&pi, &mu, &penalized).unwrap();
        pi = Policy::from_rows(shape, |n, x, row| {
            let w: Vec<f64> = (0..shape.actions).map(|a| pi.prob(n, x, a) * (q.get(n, x, a) / tau).exp()).collect();
            let z: f64 = w.iter().sum();
            row.iter_mut().zip(&w).for_each(|(r, v)| *r = v / z);
        })
        .unwrap();
        out.push(pi.clone());
    }
    out
}

/// Largest gap between the library's exploitability, `Q*`, best response
/// value and total reward and their enumeration counterparts, over the
/// uniform policy and `extra` random policies.
pub fn enumeration_discrepancy(env: &dyn Environment, extra: u64) -> f64 {
    use mfg::dynamics::{exploitability, greedy_policy, optimal_q, total_reward};
    let all = deterministic_policies(env);
    let m0 = env.initial_distribution().into_vec();
    let mut worst: f64 = 0.0;
    for seed in 0..=extra {
        let pi = if seed == 0 { Policy::uniform(env.table_shape()) } else { random_policy(env, seed) };
        let mu = mean_field(env, &pi);
        let best = all.iter().map(|p| value_forward(env, p, &mu, 0, m0.clone())).fold(f64::NEG_INFINITY, f64::max);
        let own = value_forward(env, &pi, &mu, 0, m0.clone());
        let q = optimal_q(&mu, env).unwrap();
        let br = greedy_policy(&q);
        worst = worst
            .max((total_reward(&pi, &mu, env).unwrap() - own).abs())
            .max((exploitability(&pi, env).unwrap() - (best - own)).abs())
            .max(q.sup_distance(&brute_q_star(env, &mu, &all)))
            .max((total_reward(&br, &mu, env).unwrap() - best).abs());
    }
    worst
}
