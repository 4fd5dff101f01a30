//! Library use of the experiment harness: a small sweep over temperatures,
//! then a ranking of the finished runs.

use mfg::experiment::{compare, sweep, ExperimentConfig};

const CONFIG: &str = r#"
[environment]
name = "sis"

[solver]
name = "momd"
iterations = 50
alpha = 0.99

[sweep]
tau = [0.5, 1.0, 2.0]
"#;

fn main() -> mfg::Result<()> {
    let cfg = ExperimentConfig::from_toml(CONFIG)?;
    let out = std::env::temp_dir().join("mfg_sweep_example");
    let runs = sweep(&cfg, &out, 3)?;
    let dirs: Vec<_> = runs.iter().map(|r| r.dir.clone()).collect();
    for row in compare(&dirs)? {
        println!("{:.4}  {:.4}  {}", row.final_exploitability, row.best_exploitability, row.dir.display());
    }
    Ok(())
}
