//! Exploration in the four-room grid: OMD spreads the crowd over every
//! reachable cell. Prints the terminal density as a shaded map.

use mfg::envs::{four_rooms_env, GridSpec};
use mfg::exact::omd;
use mfg::SolverParams;

fn shade(m: f64, max: f64) -> char {
    const LEVELS: [char; 5] = [' ', '.', ':', '*', '#'];
    LEVELS[((m / max) * 4.0).round().min(4.0) as usize]
}

fn main() -> mfg::Result<()> {
    let spec = GridSpec::four_rooms();
    let env = four_rooms_env(spec.clone())?;
    let params = SolverParams { iterations: 200, tau: 100.0, ..Default::default() };
    let trace = omd(&env, &params)?;
    println!("exploitability {:.4}", trace.final_exploitability());
    let last = trace.final_flow.at(trace.final_flow.len() - 1);
    let max = last.as_slice().iter().copied().fold(0.0, f64::max);
    for r in 0..spec.height {
        let row: String = (0..spec.width)
            .map(|c| {
                let cell = r * spec.width + c;
                if spec.is_wall(cell) {
                    'X'
                } else {
                    shade(last.get(cell), max)
                }
            })
            .collect();
        println!("{row}");
    }
    Ok(())
}
