//! Three populations in a rock-paper-scissors chase. Prints where each
//! population's mass sits at the start and end of the horizon.

use mfg::envs::multipop::POPULATIONS;
use mfg::envs::{multipop_env, MultiPopParams};
use mfg::exact::omd;
use mfg::SolverParams;

fn main() -> mfg::Result<()> {
    let env = multipop_env(MultiPopParams::default())?;
    let params = SolverParams { iterations: 200, tau: 30.0, ..Default::default() };
    let trace = omd(&env, &params)?;
    println!("exploitability {:.4}", trace.final_exploitability());
    let grid = env.grid();
    for n in [0, trace.final_flow.len() - 1] {
        let mu = trace.final_flow.at(n);
        for i in 0..POPULATIONS {
            let (mut cx, mut cy) = (0.0, 0.0);
            for cell in 0..env.cells() {
                let (x, y) = grid.coords(cell);
                let d = env.density(mu, i, cell);
                cx += d * x as f64;
                cy += d * y as f64;
            }
            println!("n={n:>2} population {}: centre of mass ({cx:.2}, {cy:.2})", i + 1);
        }
    }
    Ok(())
}
