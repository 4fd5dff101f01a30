//! The deep fixed-point, policy-iteration and Boltzmann baselines side by side.

use mfg::deep::{d_bi, d_bp, d_pi, DeepConfig, SolverRng};
use mfg::envs::sis::{sis_env, SisParams};
use mfg::{Environment, Policy, SolverParams};
use rand::SeedableRng;

fn main() -> mfg::Result<()> {
    let env = sis_env(SisParams::default())?;
    let params = SolverParams { iterations: 10, inner_steps: 500, ..Default::default() };
    let deep = DeepConfig { hidden: vec![32, 32], ..Default::default() };
    let uniform = Policy::uniform(env.table_shape());
    let mut rng = SolverRng::seed_from_u64(0);
    let traces = [
        ("d_bp", d_bp(&env, &params, &deep, &mut rng)?),
        ("d_pi", d_pi(&env, &params, &deep, &mut rng)?),
        ("d_bi", d_bi(&env, &params, &deep, &uniform, &mut rng)?),
    ];
    for (name, t) in &traces {
        println!("{name}: final {:.4}  best {:.4}", t.final_exploitability(), t.best_exploitability());
    }
    Ok(())
}
