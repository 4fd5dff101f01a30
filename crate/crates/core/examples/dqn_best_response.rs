//! A DQN best response against a fixed flow, scored against the exact one.

use mfg::deep::{dqn_best_response, DeepConfig, SolverRng};
use mfg::dynamics::{best_response, forward_distribution, total_reward};
use mfg::envs::sis::{sis_env, SisParams};
use mfg::{Environment, Policy, SolverParams};
use rand::SeedableRng;

fn main() -> mfg::Result<()> {
    let env = sis_env(SisParams::default())?;
    let mu = forward_distribution(&Policy::uniform(env.table_shape()), &env)?;
    let params = SolverParams { inner_steps: 3000, ..Default::default() };
    let mut rng = SolverRng::seed_from_u64(1);
    let (_, learned) = dqn_best_response(&env, &mu, &params, &DeepConfig::default(), &mut rng)?;
    let exact = best_response(&mu, &env)?;
    println!("learned value {:.4}", total_reward(&learned, &mu, &env)?);
    println!("exact value   {:.4}", total_reward(&exact, &mu, &env)?);
    Ok(())
}
