use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfg::experiment::{self, ExperimentConfig};
use mfg::Error;

#[derive(Parser)]
#[command(name = "mfg-suite", version, about = "Solve finite-horizon mean field games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configured solver and write its artifacts.
    Run(RunArgs),
    /// Run the cartesian product of the `[sweep]` axes.
    Sweep(SweepArgs),
    /// Rank finished runs by final exploitability.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Common {
    /// Output directory [default: $MFG_SUITE_OUT or ./runs]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print machine-readable JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override `solver.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Record measured wall time in exploitability.csv.
    #[arg(long)]
    wall_time: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override `solver.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs executed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Record measured wall time in exploitability.csv.
    #[arg(long)]
    wall_time: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CompareArgs {
    /// Run directories; every run below --out when omitted.
    dirs: Vec<PathBuf>,
    #[command(flatten)]
    common: Common,
}

fn out_dir(common: &Common) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| std::env::var_os("MFG_SUITE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn load(path: &PathBuf, seed: Option<u64>, wall_time: bool) -> mfg::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = seed {
        cfg.solver.seed = seed;
    }
    cfg.output.wall_time |= wall_time;
    Ok(cfg)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("summaries serialize")
}

fn execute(cli: Cli) -> mfg::Result<()> {
    match cli.command {
        Command::Run(a) => {
            let cfg = load(&a.config, a.seed, a.wall_time)?;
            let s = experiment::run(&cfg, &out_dir(&a.common))?;
            if a.common.json {
                println!("{}", json(&s));
            } else {
                println!(
                    "{} on {}: {} iterations, final exploitability {:.6}, best {:.6} -> {}",
                    s.solver,
                    s.environment,
                    s.iterations,
                    s.final_exploitability,
                    s.best_exploitability,
                    s.dir.display()
                );
            }
        }
        Command::Sweep(a) => {
            let cfg = load(&a.config, a.seed, a.wall_time)?;
            let runs = experiment::sweep(&cfg, &out_dir(&a.common), a.jobs)?;
            if a.common.json {
                println!("{}", json(&runs));
            } else {
                for s in &runs {
                    println!("{:.6}\t{:.6}\t{}", s.final_exploitability, s.best_exploitability, s.dir.display());
                }
            }
        }
        Command::Compare(a) => {
            let dirs = if a.dirs.is_empty() {
                let root = out_dir(&a.common);
                let found = experiment::find_runs(&root)?;
                if found.is_empty() {
                    return Err(Error::MissingArtifact(format!("no runs under {}", root.display())));
                }
                found
            } else {
                a.dirs
            };
            let rows = experiment::compare(&dirs)?;
            if a.common.json {
                println!("{}", json(&rows));
            } else {
                println!("final\tbest\titerations\trun");
                for r in &rows {
                    println!(
                        "{:.6}\t{:.6}\t{}\t{}",
                        r.final_exploitability,
                        r.best_exploitability,
                        r.iterations,
                        r.dir.display()
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } => ExitCode::from(2),
                Error::MissingArtifact(_) => ExitCode::from(3),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
