//! Every tabular solver on the two-state toy game.

use mfg::envs::toy_env;
use mfg::exact::{banach_picard, boltzmann_iteration, fictitious_play, momd, omd, policy_iteration};
use mfg::{Environment, Policy, SolverParams};

fn main() -> mfg::Result<()> {
    let env = toy_env();
    let params = SolverParams { iterations: 50, ..Default::default() };
    let uniform = Policy::uniform(env.table_shape());
    let runs = [
        ("bp", banach_picard(&env, &params)?),
        ("fp", fictitious_play(&env, &params)?),
        ("pi", policy_iteration(&env, &params)?),
        ("omd", omd(&env, &params)?),
        ("momd", momd(&env, &params)?),
        ("bi", boltzmann_iteration(&env, &params, &uniform)?),
    ];
    println!("{:<6}{:>14}{:>14}", "solver", "first", "final");
    for (name, t) in &runs {
        println!("{name:<6}{:>14.6}{:>14.6}", t.exploitability[0], t.final_exploitability());
    }
    Ok(())
}
