//! Exact forward and backward inductions over a known model.
//!
//! Expectations are always computed from full transition rows; nothing here
//! samples. The exploitability metric is built on top of these and is used to
//! score every solver, model-free ones included.

use crate::env::Environment;
use crate::error::{shape_err, Result};
use crate::softmax::argmax;
use crate::types::{floored_ln, Distribution, MeanFieldFlow, Policy, QKind, QTable, TableShape};

fn check_policy(policy: &Policy, env: &dyn Environment) -> Result<()> {
    if policy.shape() != env.table_shape() {
        return Err(shape_err(format!(
            "policy shape {:?} does not match environment {:?}",
            policy.shape(),
            env.table_shape()
        )));
    }
    Ok(())
}

fn check_flow(mu: &MeanFieldFlow, env: &dyn Environment) -> Result<()> {
    if mu.len() != env.horizon().len() || mu.num_states() != env.num_states() {
        return Err(shape_err(format!(
            "flow of {} slices over {} states does not match environment ({} x {})",
            mu.len(),
            mu.num_states(),
            env.horizon().len(),
            env.num_states()
        )));
    }
    Ok(())
}

/// The flow `mu^pi` induced by `policy` from `m_0`.
pub fn forward_distribution(policy: &Policy, env: &dyn Environment) -> Result<MeanFieldFlow> {
    check_policy(policy, env)?;
    let horizon = env.horizon();
    let states = env.num_states();
    let actions = env.num_actions();
    let mut flow = Vec::with_capacity(horizon.len());
    flow.push(env.initial_distribution());
    for n in 0..horizon.n_t() {
        let mu = &flow[n];
        let mut next = vec![0.0; states];
        for x in 0..states {
            let mass = mu.get(x);
            if mass == 0.0 {
                continue;
            }
            for a in 0..actions {
                let w = mass * policy.prob(n, x, a);
                if w == 0.0 {
                    continue;
                }
                let row = env.transition(n, x, a, mu);
                for (nx, p) in next.iter_mut().zip(row.as_slice()) {
                    *nx += w * p;
                }
            }
        }
        flow.push(Distribution::new(next)?);
    }
    MeanFieldFlow::new(flow, horizon)
}

/// Backward induction with a pluggable local bonus and continuation value.
///
/// `Q_n(x,a) = r_n(x,a,mu_n) + bonus(n,x,a) + sum_y p_n(y|x,a,mu_n) V_{n+1}(y)`
/// where `V_{n+1}(y) = continuation(n+1, y, Q_{n+1}(y, .))` and `Q_{N_T+1} = 0`.
pub(crate) fn backward_induction(
    mu: &MeanFieldFlow,
    env: &dyn Environment,
    kind: QKind,
    bonus: impl Fn(usize, usize, usize) -> f64,
    continuation: impl Fn(usize, usize, &[f64]) -> f64,
) -> Result<QTable> {
    check_flow(mu, env)?;
    let shape = env.table_shape();
    let n_t = env.horizon().n_t();
    let mut q = QTable::zeros(shape, kind);
    let mut value_next = vec![0.0; shape.states];
    for n in (0..=n_t).rev() {
        if n < n_t {
            for (y, v) in value_next.iter_mut().enumerate() {
                *v = continuation(n + 1, y, q.row(n + 1, y));
            }
        }
        let mu_n = mu.at(n);
        for x in 0..shape.states {
            for a in 0..shape.actions {
                let mut val = env.reward(n, x, a, mu_n) + bonus(n, x, a);
                if n < n_t {
                    let row = env.transition(n, x, a, mu_n);
                    val += row.as_slice().iter().zip(&value_next).map(|(p, v)| p * v).sum::<f64>();
                }
                q.row_mut(n, x)[a] = val;
            }
        }
    }
    if !q.is_finite() {
        return Err(crate::error::Error::NonFinite("backward induction".into()));
    }
    Ok(q)
}

/// `Q^{pi, mu}` by backward induction.
pub fn evaluate_policy(policy: &Policy, mu: &MeanFieldFlow, env: &dyn Environment) -> Result<QTable> {
    check_policy(policy, env)?;
    backward_induction(mu, env, QKind::Plain, |_, _, _| 0.0, |n, y, q_row| dot(policy.row(n, y), q_row))
}

/// Evaluation of `policy` in the game whose reward carries the extra penalty
/// `-entropy * ln pi_n(a|x)`.
///
/// The penalty of the step at which the action is fixed is left out of
/// `q_n(x, a)` and appears in the continuation, so the greedy step of an
/// entropy-regularized mirror descent can account for it explicitly.
pub fn evaluate_policy_entropy(
    policy: &Policy,
    mu: &MeanFieldFlow,
    env: &dyn Environment,
    entropy: f64,
) -> Result<QTable> {
    check_policy(policy, env)?;
    backward_induction(
        mu,
        env,
        QKind::Plain,
        |_, _, _| 0.0,
        |n, y, q_row| policy.row(n, y).iter().zip(q_row).map(|(p, q)| p * (q - entropy * floored_ln(*p))).sum(),
    )
}

/// `Q^{*, mu}` by backward induction.
pub fn optimal_q(mu: &MeanFieldFlow, env: &dyn Environment) -> Result<QTable> {
    backward_induction(
        mu,
        env,
        QKind::Plain,
        |_, _, _| 0.0,
        |_, _, q_row| q_row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Deterministic policy on the lowest-index maximizer of each row.
pub fn greedy_policy(q: &QTable) -> Policy {
    Policy::deterministic(q.shape(), |n, x| argmax(q.row(n, x)))
}

/// `J(pi, mu)`.
pub fn total_reward(policy: &Policy, mu: &MeanFieldFlow, env: &dyn Environment) -> Result<f64> {
    let q = evaluate_policy(policy, mu, env)?;
    Ok(initial_value(policy, &q, env))
}

fn initial_value(policy: &Policy, q: &QTable, env: &dyn Environment) -> f64 {
    let m0 = env.initial_distribution();
    (0..env.num_states()).map(|x| m0.get(x) * dot(policy.row(0, x), q.row(0, x))).sum()
}

/// An exact best response to `mu`.
pub fn best_response(mu: &MeanFieldFlow, env: &dyn Environment) -> Result<Policy> {
    Ok(greedy_policy(&optimal_q(mu, env)?))
}

/// `max_pi' J(pi'; mu^pi) - J(pi; mu^pi)`.
pub fn exploitability(policy: &Policy, env: &dyn Environment) -> Result<f64> {
    let mu = forward_distribution(policy, env)?;
    exploitability_against(policy, &mu, env)
}

/// Exploitability when `mu` is already known to be `mu^pi`.
pub(crate) fn exploitability_against(policy: &Policy, mu: &MeanFieldFlow, env: &dyn Environment) -> Result<f64> {
    let br = best_response(mu, env)?;
    Ok(total_reward(&br, mu, env)? - total_reward(policy, mu, env)?)
}

/// Shape of the tables this environment expects.
pub fn shape_of(env: &dyn Environment) -> TableShape {
    env.table_shape()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
