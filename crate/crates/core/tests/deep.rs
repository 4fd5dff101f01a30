use mfg::deep::{
    d_afp, d_bi, d_bp, d_momd, d_pi, dqn_best_response, munchausen_target, q_table, DeepConfig, Encoder, Encoding,
    SolverRng,
};
use mfg::dynamics::{best_response, forward_distribution, greedy_policy, optimal_q, total_reward};
use mfg::envs::sis::{sis_env, SisParams};
use mfg::envs::toy::toy_env_decoupled;
use mfg::envs::{toy_env, SingleAction};
use mfg::exact::{momd, munchausen_q, softmax_policy};
use mfg::neural::{grad_squared_loss, Mlp, OptimizerState, Regression, Transition};
use mfg::{Environment, Error, Policy, SolverParams};
use proptest::prelude::*;
use rand::SeedableRng;

fn rng(seed: u64) -> SolverRng {
    SolverRng::seed_from_u64(seed)
}

fn small() -> (SolverParams, DeepConfig) {
    let params = SolverParams { iterations: 3, inner_steps: 200, ..Default::default() };
    let deep = DeepConfig { hidden: vec![16], avg_steps: 50, ..Default::default() };
    (params, deep)
}

#[test]
fn single_action_traces_are_zero() {
    let toy = toy_env();
    let env = SingleAction::new(&toy);
    let (p, d) = small();
    let only = Policy::uniform(env.table_shape());
    let traces = [
        d_momd(&env, &p, &d, &mut rng(0)).unwrap(),
        d_afp(&env, &p, &d, &mut rng(0)).unwrap(),
        d_bp(&env, &p, &d, &mut rng(0)).unwrap(),
        d_pi(&env, &p, &d, &mut rng(0)).unwrap(),
        d_bi(&env, &p, &d, &only, &mut rng(0)).unwrap(),
    ];
    for t in &traces {
        assert_eq!(t.iterations(), 3);
        assert!(t.exploitability.iter().all(|e| e.abs() < 1e-12), "{:?}", t.exploitability);
    }
    let mu = forward_distribution(&only, &env).unwrap();
    let (_, br) = dqn_best_response(&env, &mu, &p, &d, &mut rng(1)).unwrap();
    assert_eq!(br, only);
}

#[test]
fn dqn_recovers_decoupled_optimum() {
    let env = toy_env_decoupled();
    let mu = forward_distribution(&Policy::uniform(env.table_shape()), &env).unwrap();
    let exact = greedy_policy(&optimal_q(&mu, &env).unwrap());
    let params = SolverParams { inner_steps: 4000, ..Default::default() };
    let deep = DeepConfig { hidden: vec![32, 32], ..Default::default() };
    let (_, learned) = dqn_best_response(&env, &mu, &params, &deep, &mut rng(2)).unwrap();
    assert_eq!(learned, exact);

    let params = SolverParams { iterations: 2, inner_steps: 4000, ..Default::default() };
    let t = d_bp(&env, &params, &deep, &mut rng(2)).unwrap();
    assert!(t.exploitability.iter().all(|e| e.abs() < 1e-12), "{:?}", t.exploitability);
}

#[test]
fn dqn_best_response_on_sis_is_near_optimal() {
    let env = sis_env(SisParams::default()).unwrap();
    let mu = forward_distribution(&Policy::uniform(env.table_shape()), &env).unwrap();
    let params = SolverParams { inner_steps: 3000, ..Default::default() };
    let (_, learned) = dqn_best_response(&env, &mu, &params, &DeepConfig::default(), &mut rng(1)).unwrap();
    let exact = total_reward(&best_response(&mu, &env).unwrap(), &mu, &env).unwrap();
    let got = total_reward(&learned, &mu, &env).unwrap();
    assert!((exact - got).abs() <= 0.05 * exact.abs(), "learned {got}, exact {exact}");
}

#[test]
fn munchausen_target_terminal_and_uniform_cases() {
    let env = toy_env();
    let shape = env.table_shape();
    let enc = Encoder::new(Encoding::StateTime, &env);
    let zero = Mlp::zeros(&[enc.width(), shape.actions]).unwrap();
    let uniform = Policy::uniform(shape);
    let n_t = env.horizon().n_t();
    let tau = 0.7;
    let batch = [
        Transition { n: n_t, x: 1, a: 0, r: 0.4, x_next: 1, terminal: true },
        Transition { n: 1, x: 0, a: 1, r: -0.2, x_next: 1, terminal: false },
    ];
    let ln2 = 2f64.ln();
    let y = munchausen_target(&batch, &uniform, &zero, &enc, tau, 1.0);
    assert!((y[0] - (0.4 - tau * ln2)).abs() < 1e-15);
    assert!((y[1] - (-0.2 - tau * ln2 + tau * ln2)).abs() < 1e-15);
    let y = munchausen_target(&batch, &uniform, &zero, &enc, tau, 0.0);
    assert!((y[0] - 0.4).abs() < 1e-15);
    assert!((y[1] - (-0.2 + tau * ln2)).abs() < 1e-15);
}

/// Regressing a one-hot linear head on Munchausen targets over the exact
/// transition kernel converges to the tabular Munchausen value.
#[test]
fn munchausen_regression_fixed_point_is_tabular() {
    let env = toy_env();
    let shape = env.table_shape();
    let (tau, alpha) = (1.0, 0.9);
    let exact =
        momd(&env, &SolverParams { iterations: 3, tau, alpha, record_policies: true, ..Default::default() }).unwrap();
    let prev = &exact.policies.as_ref().unwrap()[2];
    let mu = forward_distribution(prev, &env).unwrap();
    let oracle = munchausen_q(prev, &mu, &env, tau, alpha).unwrap();

    let enc = Encoder::new(Encoding::Joint, &env);
    let n_t = env.horizon().n_t();
    let mut batch = Vec::new();
    let mut weights = Vec::new();
    for n in 0..=n_t {
        for x in 0..shape.states {
            for a in 0..shape.actions {
                let r = env.reward(n, x, a, mu.at(n));
                if n == n_t {
                    batch.push(Transition { n, x, a, r, x_next: x, terminal: true });
                    weights.push(1.0);
                    continue;
                }
                for (y, p) in env.transition(n, x, a, mu.at(n)).as_slice().iter().enumerate() {
                    batch.push(Transition { n, x, a, r, x_next: y, terminal: false });
                    weights.push(*p);
                }
            }
        }
    }
    let mut net = Mlp::zeros(&[enc.width(), shape.actions]).unwrap();
    let mut opt = OptimizerState::sgd(net.num_params(), 0.5);
    for _ in 0..(n_t + 2) {
        let target = net.clone();
        let ys = munchausen_target(&batch, prev, &target, &enc, tau, alpha);
        for _ in 0..2000 {
            let samples: Vec<Regression<'_>> = batch
                .iter()
                .zip(&ys)
                .zip(&weights)
                .map(|((t, y), w)| Regression { input: enc.input(t.n, t.x), action: t.a, target: *y, weight: *w })
                .collect();
            let (_, g) = grad_squared_loss(&net, &samples).unwrap();
            opt.step(&mut net, &g).unwrap();
        }
    }
    let learned = q_table(&net, &enc, shape).unwrap();
    assert!(learned.sup_distance(&oracle) < 1e-6, "{}", learned.sup_distance(&oracle));
}

#[test]
fn tabular_capacity_tracks_exact_iterates() {
    let env = toy_env();
    let params = SolverParams {
        iterations: 5,
        inner_steps: 20_000,
        learning_rate: 0.5,
        record_policies: true,
        ..Default::default()
    };
    let deep = DeepConfig::tabular(10_000);
    let exact = momd(&env, &params).unwrap().policies.unwrap();
    let learned = d_momd(&env, &params, &deep, &mut rng(0)).unwrap().policies.unwrap();
    for (k, (a, b)) in exact.iter().zip(&learned).enumerate() {
        assert!(a.sup_distance(b) <= 0.05, "iteration {k}: {}", a.sup_distance(b));
    }
}

/// In the decoupled game the first best response is the exact optimum, so a
/// one-iteration run must distill exactly that policy.
#[test]
fn single_iteration_afp_distills_the_best_response() {
    let env = toy_env_decoupled();
    let params = SolverParams { iterations: 1, inner_steps: 4000, avg_learning_rate: 1e-2, ..Default::default() };
    let deep = DeepConfig { hidden: vec![32, 32], avg_steps: 2000, avg_episodes: 50, ..Default::default() };
    let t = d_afp(&env, &params, &deep, &mut rng(2)).unwrap();
    let mu0 = forward_distribution(&Policy::uniform(env.table_shape()), &env).unwrap();
    let br = best_response(&mu0, &env).unwrap();
    let visits = forward_distribution(&br, &env).unwrap();
    let mut checked = 0;
    for n in 0..=env.horizon().n_t() {
        for x in 0..env.num_states() {
            if visits.at(n).get(x) > 1e-3 {
                let tv: f64 =
                    0.5 * t.final_policy.row(n, x).iter().zip(br.row(n, x)).map(|(a, b)| (a - b).abs()).sum::<f64>();
                assert!(tv <= 0.1, "n={n} x={x} tv={tv}");
                checked += 1;
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn same_seed_same_trace() {
    let env = sis_env(SisParams { n_t: 10, ..Default::default() }).unwrap();
    let (p, d) = small();
    let a = d_momd(&env, &p, &d, &mut rng(11)).unwrap();
    let b = d_momd(&env, &p, &d, &mut rng(11)).unwrap();
    let c = d_momd(&env, &p, &d, &mut rng(12)).unwrap();
    assert_eq!(a.exploitability, b.exploitability);
    assert_eq!(a.final_policy, b.final_policy);
    assert_ne!(a.exploitability, c.exploitability);
    let a = d_afp(&env, &p, &d, &mut rng(11)).unwrap();
    let b = d_afp(&env, &p, &d, &mut rng(11)).unwrap();
    assert_eq!(a.exploitability, b.exploitability);
}

#[test]
fn diverging_training_is_reported() {
    let env = sis_env(SisParams::default()).unwrap();
    let params = SolverParams { iterations: 2, inner_steps: 500, learning_rate: 1e150, ..Default::default() };
    let deep = DeepConfig { optimizer: mfg::neural::OptimizerKind::Sgd, ..Default::default() };
    match d_momd(&env, &params, &deep, &mut rng(0)) {
        Err(Error::NonFinite(_)) | Err(Error::NonFiniteGradient { .. }) => {}
        other => panic!("expected a non-finite error, got {:?}", other.map(|t| t.exploitability)),
    }
}

#[test]
fn doubling_the_budget_does_not_blow_up() {
    let env = sis_env(SisParams::default()).unwrap();
    let deep = DeepConfig { hidden: vec![32, 32], ..Default::default() };
    for seed in 0..5 {
        let run = |l| {
            let p = SolverParams { iterations: 8, inner_steps: l, tau: 1.0, alpha: 0.99, ..Default::default() };
            d_momd(&env, &p, &deep, &mut rng(seed)).unwrap().final_exploitability()
        };
        let (short, long) = (run(250), run(500));
        assert!(long <= 2.0 * short, "seed {seed}: L=250 {short}, L=500 {long}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn extracted_policies_are_valid(seed in any::<u64>(), inv_temp in 0.01f64..100.0) {
        let env = sis_env(SisParams::default()).unwrap();
        let enc = Encoder::new(Encoding::StateTime, &env);
        let mut net = Mlp::new(&[enc.width(), 16, env.num_actions()], &mut rng(seed)).unwrap();
        for p in net.params_mut() {
            *p *= 10.0;
        }
        let q = q_table(&net, &enc, env.table_shape()).unwrap();
        let pi = softmax_policy(&q, inv_temp);
        for n in 0..=env.horizon().n_t() {
            for x in 0..env.num_states() {
                let s: f64 = pi.row(n, x).iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
        }
    }
}
