use super::config::DeepConfig;
use super::encoding::Encoder;
use super::train::{q_table, roll_episode, sample_action, QFitter, SolverRng, TargetRule};
use crate::dynamics::{exploitability_against, forward_distribution, greedy_policy};
use crate::env::Environment;
use crate::error::Result;
use crate::exact::{check_reference, softmax_policy, weighted_softmax_policy, SolverTrace, TraceRecorder};
use crate::neural::{grad_cross_entropy, Labeled, Mlp, OptimizerState, ReservoirBuffer};
use crate::types::{MeanFieldFlow, Policy, SolverParams};

/// Shared state of one deep run: the encoder and network factory.
struct DeepRun<'a> {
    env: &'a dyn Environment,
    params: &'a SolverParams,
    deep: &'a DeepConfig,
    encoder: Encoder,
    sizes: Vec<usize>,
}

impl<'a> DeepRun<'a> {
    fn new(env: &'a dyn Environment, params: &'a SolverParams, deep: &'a DeepConfig) -> Result<Self> {
        params.validate()?;
        deep.validate()?;
        let encoder = Encoder::new(deep.encoding, env);
        let sizes = deep.layer_sizes(encoder.width(), env.num_actions());
        Ok(Self { env, params, deep, encoder, sizes })
    }

    fn fresh_net(&self, rng: &mut SolverRng) -> Result<Mlp> {
        let mut net = Mlp::new(&self.sizes, rng)?;
        if self.deep.zero_init_output {
            net.zero_output_layer();
        }
        Ok(net)
    }

    fn optimizer(&self, net: &Mlp, lr: f64) -> OptimizerState {
        OptimizerState::new(self.deep.optimizer, net.num_params(), lr)
    }

    fn fitter(&self) -> QFitter<'_> {
        QFitter { env: self.env, encoder: &self.encoder, params: self.params, deep: self.deep }
    }

    /// Fits `net` under `rule` against `mu`, first replacing it by a fresh
    /// network unless warm starts are enabled.
    fn fit(
        &self,
        mu: &MeanFieldFlow,
        net: &mut Mlp,
        opt: &mut OptimizerState,
        rule: &TargetRule<'_>,
        rng: &mut SolverRng,
    ) -> Result<crate::types::QTable> {
        if !self.deep.warm_start {
            *net = self.fresh_net(rng)?;
            *opt = self.optimizer(net, self.params.learning_rate);
        }
        self.fitter().fit(mu, net, opt, rule, rng)?;
        q_table(net, &self.encoder, self.env.table_shape())
    }

    fn extract(&self, q: &crate::types::QTable) -> Policy {
        if self.params.soft_br {
            softmax_policy(q, 1.0 / self.params.eta)
        } else {
            greedy_policy(q)
        }
    }
}

/// Trains a Q-network against `mu` by DQN and returns it with its greedy policy.
pub fn dqn_best_response(
    env: &dyn Environment,
    mu: &MeanFieldFlow,
    params: &SolverParams,
    deep: &DeepConfig,
    rng: &mut SolverRng,
) -> Result<(Mlp, Policy)> {
    let run = DeepRun::new(env, params, deep)?;
    let mut net = run.fresh_net(rng)?;
    let mut opt = run.optimizer(&net, params.learning_rate);
    run.fitter().fit(mu, &mut net, &mut opt, &TargetRule::Optimal, rng)?;
    let q = q_table(&net, &run.encoder, env.table_shape())?;
    Ok((net, greedy_policy(&q)))
}

/// Deep Munchausen OMD: one network regressed on the Munchausen target of
/// the previous iterate's softmax policy.
pub fn d_momd(
    env: &dyn Environment,
    params: &SolverParams,
    deep: &DeepConfig,
    rng: &mut SolverRng,
) -> Result<SolverTrace> {
    let run = DeepRun::new(env, params, deep)?;
    let shape = env.table_shape();
    let mut rec = TraceRecorder::new(params);
    let mut net = run.fresh_net(rng)?;
    let mut opt = run.optimizer(&net, params.learning_rate);
    let inv_tau = 1.0 / params.tau;
    let mut pi = softmax_policy(&q_table(&net, &run.encoder, shape)?, inv_tau);
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let rule = TargetRule::Munchausen { prev: &pi, tau: params.tau, alpha: params.alpha };
        let q = run.fit(&mu, &mut net, &mut opt, &rule, rng)?;
        pi = softmax_policy(&q, inv_tau);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    Ok(rec.finish(pi, mu))
}

/// Deep fictitious play: DQN best responses distilled into an average-policy
/// network through a reservoir of visited state-action pairs.
pub fn d_afp(
    env: &dyn Environment,
    params: &SolverParams,
    deep: &DeepConfig,
    rng: &mut SolverRng,
) -> Result<SolverTrace> {
    let run = DeepRun::new(env, params, deep)?;
    let shape = env.table_shape();
    let mut rec = TraceRecorder::new(params);
    let mut br_net = run.fresh_net(rng)?;
    let mut br_opt = run.optimizer(&br_net, params.learning_rate);
    let mut avg_net = run.fresh_net(rng)?;
    let mut avg_opt = run.optimizer(&avg_net, params.avg_learning_rate);
    let mut reservoir: ReservoirBuffer<(usize, usize, usize)> = ReservoirBuffer::new(deep.reservoir_capacity);
    let mut avg_pi = softmax_policy(&q_table(&avg_net, &run.encoder, shape)?, 1.0);
    let mut avg_mu = forward_distribution(&avg_pi, env)?;
    for _ in 0..params.iterations {
        let q = run.fit(&avg_mu, &mut br_net, &mut br_opt, &TargetRule::Optimal, rng)?;
        let br = greedy_policy(&q);
        let br_mu = forward_distribution(&br, env)?;
        for _ in 0..deep.avg_episodes {
            let mut visited = Vec::with_capacity(shape.steps);
            roll_episode(
                env,
                &br_mu,
                rng,
                |n, x, rng| sample_action(br.row(n, x), rng),
                |t| visited.push((t.n, t.x, t.a)),
            );
            for item in visited {
                reservoir.offer(item, rng);
            }
        }
        for _ in 0..deep.avg_steps {
            let batch: Vec<Labeled<'_>> = reservoir
                .sample(params.batch_size, rng)
                .into_iter()
                .map(|&(n, x, a)| Labeled { input: run.encoder.input(n, x), action: a })
                .collect();
            let (_, grad) = grad_cross_entropy(&avg_net, &batch)?;
            avg_opt.step(&mut avg_net, &grad)?;
            if !avg_net.is_finite() {
                return Err(crate::Error::NonFinite("average-policy network".into()));
            }
        }
        avg_pi = softmax_policy(&q_table(&avg_net, &run.encoder, shape)?, 1.0);
        avg_mu = forward_distribution(&avg_pi, env)?;
        rec.record(&avg_pi, exploitability_against(&avg_pi, &avg_mu, env)?)?;
    }
    Ok(rec.finish(avg_pi, avg_mu))
}

/// Deep Banach-Picard: a DQN best response to the flow of the previous policy.
pub fn d_bp(
    env: &dyn Environment,
    params: &SolverParams,
    deep: &DeepConfig,
    rng: &mut SolverRng,
) -> Result<SolverTrace> {
    let run = DeepRun::new(env, params, deep)?;
    let mut rec = TraceRecorder::new(params);
    let mut net = run.fresh_net(rng)?;
    let mut opt = run.optimizer(&net, params.learning_rate);
    let mut pi = Policy::uniform(env.table_shape());
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = run.fit(&mu, &mut net, &mut opt, &TargetRule::Optimal, rng)?;
        pi = run.extract(&q);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    Ok(rec.finish(pi, mu))
}

/// Deep policy iteration: sampled evaluation of the current policy, then a
/// greedy (or soft) improvement.
pub fn d_pi(
    env: &dyn Environment,
    params: &SolverParams,
    deep: &DeepConfig,
    rng: &mut SolverRng,
) -> Result<SolverTrace> {
    let run = DeepRun::new(env, params, deep)?;
    let mut rec = TraceRecorder::new(params);
    let mut net = run.fresh_net(rng)?;
    let mut opt = run.optimizer(&net, params.learning_rate);
    let mut pi = Policy::uniform(env.table_shape());
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = run.fit(&mu, &mut net, &mut opt, &TargetRule::Evaluation(&pi), rng)?;
        pi = run.extract(&q);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    Ok(rec.finish(pi, mu))
}

/// Deep Boltzmann iteration: `pi ∝ pi_B exp(Q_dqn / eta)`.
pub fn d_bi(
    env: &dyn Environment,
    params: &SolverParams,
    deep: &DeepConfig,
    reference: &Policy,
    rng: &mut SolverRng,
) -> Result<SolverTrace> {
    let run = DeepRun::new(env, params, deep)?;
    check_reference(reference, env.table_shape())?;
    let mut rec = TraceRecorder::new(params);
    let mut net = run.fresh_net(rng)?;
    let mut opt = run.optimizer(&net, params.learning_rate);
    let mut pi = reference.clone();
    let mut mu = forward_distribution(&pi, env)?;
    for _ in 0..params.iterations {
        let q = run.fit(&mu, &mut net, &mut opt, &TargetRule::Optimal, rng)?;
        pi = weighted_softmax_policy(&q, params.eta, reference);
        mu = forward_distribution(&pi, env)?;
        rec.record(&pi, exploitability_against(&pi, &mu, env)?)?;
    }
    Ok(rec.finish(pi, mu))
}
