//! A crowd crossing a maze to a target cell, with congestion costs. Compares
//! the straight-line and shortest-path distance rewards.

use mfg::envs::grid::{maze_env_with, DistanceMetric};
use mfg::envs::GridSpec;
use mfg::exact::omd;
use mfg::SolverParams;

fn main() -> mfg::Result<()> {
    let spec = GridSpec::maze();
    let target = spec.target.expect("bundled maze has a target");
    let params = SolverParams { iterations: 200, tau: 30.0, ..Default::default() };
    for metric in [DistanceMetric::Manhattan, DistanceMetric::ShortestPath] {
        let env = maze_env_with(spec.clone(), metric)?;
        let trace = omd(&env, &params)?;
        let arrived = trace.final_flow.at(trace.final_flow.len() - 1).get(target);
        println!(
            "{metric:?}: exploitability {:.4}, mass on target at N_T {:.3}",
            trace.final_exploitability(),
            arrived
        );
    }
    Ok(())
}
