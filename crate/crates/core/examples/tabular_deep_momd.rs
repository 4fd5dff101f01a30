//! With one-hot inputs, a linear head and exhaustive sampled targets, deep
//! MOMD reproduces the tabular iterates.

use mfg::deep::{d_momd, DeepConfig, SolverRng};
use mfg::envs::toy_env;
use mfg::exact::momd;
use mfg::neural::OptimizerKind;
use mfg::SolverParams;
use rand::SeedableRng;

fn main() -> mfg::Result<()> {
    let env = toy_env();
    let params = SolverParams {
        iterations: 10,
        inner_steps: 20_000,
        learning_rate: 0.5,
        record_policies: true,
        ..Default::default()
    };
    let deep = DeepConfig { optimizer: OptimizerKind::Sgd, ..DeepConfig::tabular(10_000) };
    let exact = momd(&env, &params)?;
    let learned = d_momd(&env, &params, &deep, &mut SolverRng::seed_from_u64(0))?;
    let (a, b) = (exact.policies.unwrap(), learned.policies.unwrap());
    for (k, (p, q)) in a.iter().zip(&b).enumerate() {
        println!("iteration {:>2}: sup |pi_exact - pi_deep| = {:.2e}", k + 1, p.sup_distance(q));
    }
    Ok(())
}
