//! Tabular equilibrium-learning iterations over a known model.
//!
//! Every solver starts from the uniform policy (the reference policy for
//! Boltzmann iteration) and records the exploitability of the policy it holds
//! after each iteration.

use std::time::Instant;

use crate::dynamics::{
    backward_induction, best_response, evaluate_policy, evaluate_policy_entropy, exploitability_against,
    forward_distribution, greedy_policy, optimal_q,
};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::softmax::softmax_into;
use crate::types::{
    floored_ln, Distribution, MeanFieldFlow, Policy, QKind, QTable, SolverParams, TableShape, PROB_FLOOR,
};

/// Per-iteration record of a solver run.
#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub exploitability: Vec<f64>,
    /// Seconds since the start of the run, at the end of each iteration.
    pub elapsed: Vec<f64>,
    pub final_policy: Policy,
    pub final_flow: MeanFieldFlow,
    /// Policy after each iteration, when requested.
    pub policies: Option<Vec<Policy>>,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.exploitability.len()
    }

    pub fn final_exploitability(&self) -> f64 {
        *self.exploitability.last().expect("at least one iteration")
    }

    pub fn best_exploitability(&self) -> f64 {
        self.exploitability.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub(crate) struct TraceRecorder {
    start: Instant,
    exploitability: Vec<f64>,
    elapsed: Vec<f64>,
    policies: Option<Vec<Policy>>,
}

impl TraceRecorder {
    pub(crate) fn new(params: &SolverParams) -> Self {
        Self {
            start: Instant::now(),
            exploitability: Vec::with_capacity(params.iterations),
            elapsed: Vec::with_capacity(params.iterations),
            policies: params.record_policies.then(Vec::new),
        }
    }

    pub(crate) fn record(&mut self, policy: &Policy, exploitability: f64) -> Result<()> {
        if !exploitability.is_finite() {
            return Err(Error::NonFinite(format!("exploitability at iteration {}", self.exploitability.len() + 1)));
        }
        self.exploitability.push(exploitability);
        self.elapsed.push(self.start.elapsed().as_secs_f64());
        if let Some(p) = self.policies.as_mut() {
            p.push(policy.clone());
        }
        Ok(())
    }

    pub(crate) fn finish(self, final_policy: Policy, final_flow: MeanFieldFlow) -> SolverTrace {
        SolverTrace {
            exploitability: self.exploitability,
            elapsed: self.elapsed,
            final_policy,
            final_flow,
            policies: self.policies,
        }
    }
}

/// `softmax(inv_temp * Q_n(x, .))` in every state.
pub fn softmax_policy(q: &QTable, inv_temp: f64) -> Policy {
    let shape = q.shape();
    Policy::from_rows(shape, |n, x, row| softmax_into(q.row(n, x), inv_temp, row))
        .expect("softmax rows are distributions")
}

/// `pi_B(a|x) exp(Q(x,a) / eta)`, normalized per state.
pub fn weighted_softmax_policy(q: &QTable, eta: f64, reference: &Policy) -> Policy {
    let shape = q.shape();
    let mut logits = vec![0.0; shape.actions];
    Policy::from_rows(shape, |n, x, row| {
        for (l, (qv, p)) in logits.iter_mut().zip(q.row(n, x).iter().zip(reference.row(n, x))) {
            *l = qv / eta + floored_ln(*p);
        }
        softmax_into(&logits, 1.0, row)
    })
    .expect("softmax rows are distributions")
}

/// Running average of flows, `mu_bar^k = (k-1)/k mu_bar^{k-1} + mu^k / k`.
#[derive(Debug, Clone, Default)]
pub struct FlowAverage {
    count: usize,
    mean: Vec<Vec<f64>>,
}

impl FlowAverage {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, flow: &MeanFieldFlow) {
        self.count += 1;
        let k = self.count as f64;
        if self.count == 1 {
            self.mean = flow.iter().map(|d| d.as_slice().to_vec()).collect();
            return;
        }
        for (m, d) in self.mean.iter_mut().zip(flow.iter()) {
            for (mv, dv) in m.iter_mut().zip(d.as_slice()) {
                *mv = (k - 1.0) / k * *mv + dv / k;
            }
        }
    }

    pub fn flow(&self, env: &dyn Environment) -> Result<MeanFieldFlow> {
        let slices = self.mean.iter().map(|m| Distribution::new(m.clone())).collect::<Result<Vec<_>>>()?;
        MeanFieldFlow::new(slices, env.horizon())
    }
}

/// The flow-conditional mixture of a sequence of policies:
/// `pi_bar_n(a|x) ∝ sum_i mu^i_n(x) pi^i_n(a|x)`, falling back to the plain
/// average of the policies where no flow puts mass.
#[derive(Debug, Clone)]
pub struct PolicyMixture {
    shape: TableShape,
    weighted: Vec<f64>,
    weight: Vec<f64>,
    plain: Vec<f64>,
    count: usize,
}

impl PolicyMixture {
    pub fn new(shape: TableShape) -> Self {
        Self {
            shape,
            weighted: vec![0.0; shape.len()],
            weight: vec![0.0; shape.steps * shape.states],
            plain: vec![0.0; shape.len()],
            count: 0,
        }
    }

    /// Adds `policy`, followed by the part of the population whose flow is `flow`.
    pub fn push(&mut self, policy: &Policy, flow: &MeanFieldFlow) {
        self.count += 1;
        let s = self.shape;
        for n in 0..s.steps {
            let mu = flow.at(n);
            for x in 0..s.states {
                let w = mu.get(x);
                self.weight[n * s.states + x] += w;
                let start = s.row_start(n, x);
                for (a, p) in policy.row(n, x).iter().enumerate() {
                    self.weighted[start + a] += w * p;
                    self.plain[start + a] += p;
                }
            }
        }
    }

    pub fn policy(&self) -> Policy {
        let s = self.shape;
        let count = self.count.max(1) as f64;
        Policy::from_rows(s, |n, x, row| {
            let w = self.weight[n * s.states + x];
            let start = s.row_start(n, x);
            if w > PROB_FLOOR {
                let total: f64 = self.weighted[start..start + s.actions].iter().sum();
                for (a, r) in row.iter_mut().enumerate() {
                    *r = self.weighted[start + a] / total;
                }
            } else {
                for (a, r) in row.iter_mut().enumerate() {
                    *r = self.plain[start + a] / count;
                }
            }
        })
        .expect("mixture rows are distributions")
    }
}

fn finish_run(rec: TraceRecorder, policy: Policy, flow: MeanFieldFlow) -> Result<SolverTrace> {
    Ok(rec.finish(policy, flow))
}

/// Alternates the induced flow and a best response to it.
pub fn banach_picard(env: &dyn Environment, params: &SolverParams) -> Result<SolverTrace> {
    params.validate()?;
    let mut rec = TraceRecorder::new(params);
    let mut pi = Policy::uniform(env.table_shape());
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = optimal_q(&mu, env)?;
        pi = if params.soft_br { softmax_policy(&q, 1.0 / params.eta) } else { greedy_policy(&q) };
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    finish_run(rec, pi, mu)
}

/// Best-responds to the running average of all induced flows; scores the
/// mixture policy that generates that average.
pub fn fictitious_play(env: &dyn Environment, params: &SolverParams) -> Result<SolverTrace> {
    params.validate()?;
    let mut rec = TraceRecorder::new(params);
    let mut average = FlowAverage::new();
    let mut mixture = PolicyMixture::new(env.table_shape());
    let mut pi = Policy::uniform(env.table_shape());
    let mut mixed = pi.clone();
    for k in 1..=params.iterations {
        let mu = forward_distribution(&pi, env)?;
        average.push(&mu);
        mixture.push(&pi, &mu);
        mixed = mixture.policy();
        let mixed_flow = forward_distribution(&mixed, env)?;
        rec.record(&mixed, exploitability_against(&mixed, &mixed_flow, env)?)?;
        if k < params.iterations {
            pi = best_response(&average.flow(env)?, env)?;
        }
    }
    let flow = average.flow(env)?;
    finish_run(rec, mixed, flow)
}

/// Evaluates the current policy against its own flow and acts greedily
/// (or softly with temperature `eta`) on the result.
pub fn policy_iteration(env: &dyn Environment, params: &SolverParams) -> Result<SolverTrace> {
    params.validate()?;
    let mut rec = TraceRecorder::new(params);
    let mut pi = Policy::uniform(env.table_shape());
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = evaluate_policy(&pi, &mu, env)?;
        pi = if params.soft_br { softmax_policy(&q, 1.0 / params.eta) } else { greedy_policy(&q) };
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    finish_run(rec, pi, mu)
}

/// Online mirror descent: `q_bar += Q^{pi, mu^pi} / tau`, `pi = softmax(q_bar)`.
pub fn omd(env: &dyn Environment, params: &SolverParams) -> Result<SolverTrace> {
    params.validate()?;
    let mut rec = TraceRecorder::new(params);
    let mut cumulative = QTable::zeros(env.table_shape(), QKind::Cumulative);
    let mut pi = softmax_policy(&cumulative, 1.0);
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = evaluate_policy(&pi, &mu, env)?;
        cumulative.add_scaled(&q, 1.0 / params.tau);
        pi = softmax_policy(&cumulative, 1.0);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    finish_run(rec, pi, mu)
}

/// The Munchausen-regularized value of `policy` against `mu`:
///
/// `Q_n(x,a) = r_n(x,a,mu_n) + alpha tau ln pi_n(a|x)
///     + sum_y p_n(y|x,a,mu_n) sum_b pi_{n+1}(b|y) [Q_{n+1}(y,b) - tau ln pi_{n+1}(b|y)]`
///
/// with `Q_{N_T+1} = 0` and logs taken of floored probabilities.
pub fn munchausen_q(
    policy: &Policy,
    mu: &MeanFieldFlow,
    env: &dyn Environment,
    tau: f64,
    alpha: f64,
) -> Result<QTable> {
    if policy.shape() != env.table_shape() {
        return Err(Error::ShapeMismatch("policy does not match environment".into()));
    }
    backward_induction(
        mu,
        env,
        QKind::Munchausen,
        |n, x, a| alpha * tau * floored_ln(policy.prob(n, x, a)),
        |n, y, q_row| policy.row(n, y).iter().zip(q_row).map(|(p, q)| p * (q - tau * floored_ln(*p))).sum(),
    )
}

/// Munchausen OMD: `pi^{k+1} = softmax(Q_munchausen(pi^k, mu^{pi^k}) / tau)`.
pub fn momd(env: &dyn Environment, params: &SolverParams) -> Result<SolverTrace> {
    params.validate()?;
    let mut rec = TraceRecorder::new(params);
    let mut pi = Policy::uniform(env.table_shape());
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = munchausen_q(&pi, &mu, env, params.tau, params.alpha)?;
        pi = softmax_policy(&q, 1.0 / params.tau);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    finish_run(rec, pi, mu)
}

/// Mirror descent on the game whose reward carries `-entropy * ln pi`, with a
/// KL proximal term of weight `kl_weight` (inverse learning rate):
///
/// `pi^{k+1} = argmax <pi, q^k> - kl_weight KL(pi || pi^k) + entropy H(pi)`
///
/// where `q^k` is the regularized evaluation of `pi^k`. With `entropy = 0` this
/// is [`omd`] with `tau = kl_weight`. Logits are carried exactly, so no
/// probability floor enters the proximal step.
pub fn regularized_omd(
    env: &dyn Environment,
    params: &SolverParams,
    kl_weight: f64,
    entropy: f64,
) -> Result<SolverTrace> {
    params.validate()?;
    if !(kl_weight > 0.0) || entropy < 0.0 {
        return Err(crate::error::invalid("kl_weight", "needs kl_weight > 0 and entropy >= 0"));
    }
    let mut rec = TraceRecorder::new(params);
    let shape = env.table_shape();
    let mut logits = QTable::zeros(shape, QKind::Cumulative);
    let mut pi = softmax_policy(&logits, 1.0);
    let mut mu = forward_distribution(&pi, env)?;
    let denom = kl_weight + entropy;
    for _ in 0..params.iterations {
        let q = evaluate_policy_entropy(&pi, &mu, env, entropy)?;
        for n in 0..shape.steps {
            for x in 0..shape.states {
                let qrow = q.row(n, x);
                for (l, qv) in logits.row_mut(n, x).iter_mut().zip(qrow) {
                    *l = (qv + kl_weight * *l) / denom;
                }
            }
        }
        pi = softmax_policy(&logits, 1.0);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    finish_run(rec, pi, mu)
}

/// Rejects reference policies without full support.
pub(crate) fn check_reference(reference: &Policy, shape: TableShape) -> Result<()> {
    if reference.shape() != shape {
        return Err(Error::ShapeMismatch("reference policy does not match environment".into()));
    }
    for n in 0..shape.steps {
        for x in 0..shape.states {
            for (a, &p) in reference.row(n, x).iter().enumerate() {
                if p < PROB_FLOOR {
                    return Err(Error::ZeroSupportReference { n, x, a, value: p });
                }
            }
        }
    }
    Ok(())
}

/// Boltzmann iteration: `pi^k ∝ pi_B exp(Q^{*, mu^k} / eta)` with `mu^k` the
/// flow of the previous iterate, starting from `pi_B`.
pub fn boltzmann_iteration(env: &dyn Environment, params: &SolverParams, reference: &Policy) -> Result<SolverTrace> {
    params.validate()?;
    check_reference(reference, env.table_shape())?;
    let mut rec = TraceRecorder::new(params);
    let mut pi = reference.clone();
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = optimal_q(&mu, env)?;
        pi = weighted_softmax_policy(&q, params.eta, reference);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    finish_run(rec, pi, mu)
}
