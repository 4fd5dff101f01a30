//! Deep average-network fictitious play on SIS: DQN best responses distilled
//! into an average policy network from a reservoir.

use mfg::deep::{d_afp, DeepConfig, SolverRng};
use mfg::envs::sis::{sis_env, SisParams};
use mfg::SolverParams;
use rand::SeedableRng;

fn main() -> mfg::Result<()> {
    let env = sis_env(SisParams::default())?;
    let params = SolverParams { iterations: 10, inner_steps: 500, avg_learning_rate: 1e-2, ..Default::default() };
    let deep = DeepConfig { hidden: vec![32, 32], avg_steps: 200, ..Default::default() };
    let mut rng = SolverRng::seed_from_u64(3);
    let trace = d_afp(&env, &params, &deep, &mut rng)?;
    println!(
        "first {:.4}  final {:.4}  best {:.4}",
        trace.exploitability[0],
        trace.final_exploitability(),
        trace.best_exploitability()
    );
    Ok(())
}
