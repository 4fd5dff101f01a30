//! Deep Munchausen OMD on SIS with a small training budget. The learner only
//! sees sampled transitions; exploitability is computed exactly.

use mfg::deep::{d_momd, DeepConfig, SolverRng};
use mfg::envs::sis::{sis_env, SisParams};
use mfg::SolverParams;
use rand::SeedableRng;

fn main() -> mfg::Result<()> {
    let env = sis_env(SisParams::default())?;
    let params = SolverParams { iterations: 15, inner_steps: 500, tau: 1.0, alpha: 0.99, ..Default::default() };
    let deep = DeepConfig { hidden: vec![32, 32], ..Default::default() };
    let mut rng = SolverRng::seed_from_u64(7);
    let trace = d_momd(&env, &params, &deep, &mut rng)?;
    for (k, e) in trace.exploitability.iter().enumerate() {
        println!("iteration {:>2}: {e:.4}", k + 1);
    }
    Ok(())
}
