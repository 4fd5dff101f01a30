//! Boltzmann iteration against a non-uniform reference policy, for a few
//! temperatures.

use mfg::envs::sis::{sis_env, SisParams};
use mfg::exact::boltzmann_iteration;
use mfg::{Environment, Policy, SolverParams};

fn main() -> mfg::Result<()> {
    let env = sis_env(SisParams::default())?;
    let shape = env.table_shape();
    let reference = Policy::from_rows(shape, |_, _, row| row.copy_from_slice(&[0.7, 0.3]))?;
    for eta in [0.1, 1.0, 10.0] {
        let params = SolverParams { iterations: 100, eta, ..Default::default() };
        let trace = boltzmann_iteration(&env, &params, &reference)?;
        println!("eta {eta:>5}: final {:.4}  best {:.4}", trace.final_exploitability(), trace.best_exploitability());
    }
    Ok(())
}
