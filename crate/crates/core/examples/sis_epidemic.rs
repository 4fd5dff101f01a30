//! OMD, fictitious play and fixed-point iteration on the SIS epidemic.

use mfg::envs::sis::{sis_env, SisParams, INFECTED};
use mfg::exact::{banach_picard, fictitious_play, omd};
use mfg::SolverParams;

fn main() -> mfg::Result<()> {
    let env = sis_env(SisParams::default())?;
    let params = SolverParams { iterations: 300, ..Default::default() };
    for (name, trace) in
        [("omd", omd(&env, &params)?), ("fp", fictitious_play(&env, &params)?), ("bp", banach_picard(&env, &params)?)]
    {
        let e = &trace.exploitability;
        println!(
            "{name:>4}: e1 {:.4}  e10 {:.4}  e100 {:.4}  e300 {:.4}  best {:.4}",
            e[0],
            e[9],
            e[99],
            e[299],
            trace.best_exploitability()
        );
        let infected: Vec<String> =
            trace.final_flow.iter().step_by(10).map(|d| format!("{:.3}", d.get(INFECTED))).collect();
        println!("      infected share every 10 steps: {}", infected.join(" "));
    }
    Ok(())
}
