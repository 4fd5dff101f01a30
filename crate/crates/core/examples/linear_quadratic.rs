//! Munchausen OMD on the discretized linear-quadratic game; prints the mean
//! position of the population over time.

use mfg::envs::{lq_env, LqParams};
use mfg::exact::momd;
use mfg::SolverParams;

fn main() -> mfg::Result<()> {
    let env = lq_env(LqParams::default())?;
    let params = SolverParams { iterations: 100, tau: 1.0, alpha: 0.99, ..Default::default() };
    let trace = momd(&env, &params)?;
    println!("exploitability {:.3e} after {} iterations", trace.final_exploitability(), trace.iterations());
    for (n, d) in trace.final_flow.iter().enumerate() {
        println!("n={n:>2}  mean state {:.3}", d.mean_index());
    }
    Ok(())
}
