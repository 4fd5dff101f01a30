//! Config-driven runs, sweeps and comparisons with on-disk artifacts.

pub mod artifacts;
pub mod config;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::SeedableRng;
use serde::Serialize;

use crate::deep::{d_afp, d_bi, d_bp, d_momd, d_pi, SolverRng};
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::exact::{banach_picard, boltzmann_iteration, fictitious_play, momd, omd, policy_iteration, SolverTrace};
use crate::types::Policy;

pub use artifacts::{read_exploitability, read_manifest, EXPLOITABILITY_CSV, FLOW_CSV, MANIFEST, POLICY_CSV};
pub use config::{
    EnvironmentConfig, ExperimentConfig, GridConfig, MazeConfig, MultiPopConfig, OutputConfig, SolverConfig,
    SolverKind, SweepConfig,
};

/// Runs the configured solver on the configured environment.
pub fn solve(cfg: &ExperimentConfig, env: &dyn Environment) -> Result<SolverTrace> {
    let params = cfg.solver.params();
    let deep = &cfg.neural;
    let mut rng = SolverRng::seed_from_u64(params.seed);
    let uniform = Policy::uniform(env.table_shape());
    match cfg.solver.kind()? {
        SolverKind::Bp => banach_picard(env, &params),
        SolverKind::Fp => fictitious_play(env, &params),
        SolverKind::Pi => policy_iteration(env, &params),
        SolverKind::Omd => omd(env, &params),
        SolverKind::Momd => momd(env, &params),
        SolverKind::Bi => boltzmann_iteration(env, &params, &uniform),
        SolverKind::DAfp => d_afp(env, &params, deep, &mut rng),
        SolverKind::DMomd => d_momd(env, &params, deep, &mut rng),
        SolverKind::DBp => d_bp(env, &params, deep, &mut rng),
        SolverKind::DPi => d_pi(env, &params, deep, &mut rng),
        SolverKind::DBi => d_bi(env, &params, deep, &uniform, &mut rng),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub solver: String,
    pub environment: String,
    pub seed: u64,
    pub iterations: usize,
    pub final_exploitability: f64,
    pub best_exploitability: f64,
}

/// Solves `cfg` and writes its artifacts into `out`.
pub fn run(cfg: &ExperimentConfig, out: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let env = cfg.environment.build()?;
    let trace = solve(cfg, env.as_ref())?;
    std::fs::create_dir_all(out)?;
    artifacts::write_exploitability(&out.join(EXPLOITABILITY_CSV), &trace, cfg.output.wall_time)?;
    artifacts::write_flows(out, &trace.final_flow, env.as_ref())?;
    artifacts::write_policy(&out.join(POLICY_CSV), &trace.final_policy)?;
    artifacts::write_manifest(&out.join(MANIFEST), cfg, &trace)?;
    Ok(RunSummary {
        dir: out.to_path_buf(),
        solver: cfg.solver.kind()?.as_str().to_string(),
        environment: env.name().to_string(),
        seed: cfg.solver.seed,
        iterations: trace.iterations(),
        final_exploitability: trace.final_exploitability(),
        best_exploitability: trace.best_exploitability(),
    })
}

/// One point of a sweep: the resolved config and its output directory
/// relative to the sweep root.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub relative: PathBuf,
    pub config: ExperimentConfig,
}

fn fmt_hidden(h: &[usize]) -> String {
    if h.is_empty() {
        "linear".into()
    } else {
        h.iter().map(|w| w.to_string()).collect::<Vec<_>>().join("x")
    }
}

/// The cartesian product of the sweep axes, in a fixed order.
pub fn expand_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    let s = &cfg.sweep;
    let base = cfg.solver.kind()?;
    let solvers = if s.solver.is_empty() { vec![base] } else { s.solver.clone() };
    let mut points = vec![SweepPoint { relative: PathBuf::new(), config: cfg.clone() }];
    let mut axis = |apply: &dyn Fn(&mut ExperimentConfig, usize) -> String, len: usize| {
        if len == 0 {
            return;
        }
        points = points
            .drain(..)
            .flat_map(|p| {
                (0..len).map(move |i| {
                    let mut c = p.config.clone();
                    let seg = apply(&mut c, i);
                    SweepPoint { relative: p.relative.join(seg), config: c }
                })
            })
            .collect();
    };
    axis(
        &|c, i| {
            c.solver.name = Some(solvers[i]);
            format!("solver={}", solvers[i].as_str())
        },
        solvers.len(),
    );
    axis(
        &|c, i| {
            c.solver.tau = s.tau[i];
            format!("tau={}", s.tau[i])
        },
        s.tau.len(),
    );
    axis(
        &|c, i| {
            c.solver.alpha = s.alpha[i];
            format!("alpha={}", s.alpha[i])
        },
        s.alpha.len(),
    );
    axis(
        &|c, i| {
            c.solver.eta = s.eta[i];
            format!("eta={}", s.eta[i])
        },
        s.eta.len(),
    );
    axis(
        &|c, i| {
            c.solver.learning_rate = s.lr[i];
            format!("lr={}", s.lr[i])
        },
        s.lr.len(),
    );
    axis(
        &|c, i| {
            c.neural.hidden = s.hidden[i].clone();
            format!("hidden={}", fmt_hidden(&s.hidden[i]))
        },
        s.hidden.len(),
    );
    axis(
        &|c, i| {
            c.solver.seed = s.seed[i];
            format!("seed={}", s.seed[i])
        },
        s.seed.len(),
    );
    for p in &mut points {
        p.config.sweep = SweepConfig::default();
    }
    Ok(points)
}

/// Runs every sweep point under `out` on `jobs` worker threads. Results keep
/// the order of [`expand_sweep`]; the first failure is returned after all
/// workers stop.
pub fn sweep(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<Vec<RunSummary>> {
    let points = expand_sweep(cfg)?;
    let jobs = jobs.clamp(1, points.len().max(1));
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<RunSummary>>>> = Mutex::new(vec![None; points.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(point) = points.get(i) else { break };
                let r = run(&point.config, &out.join(&point.relative));
                results.lock().expect("no worker panics while holding the lock")[i] = Some(r);
            });
        }
    });
    results.into_inner().expect("workers joined").into_iter().map(|r| r.expect("every point ran")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub dir: PathBuf,
    pub iterations: usize,
    pub final_exploitability: f64,
    pub best_exploitability: f64,
}

/// Reads the exploitability curves of finished runs, sorted by final
/// exploitability (ties broken by directory name).
pub fn compare(dirs: &[PathBuf]) -> Result<Vec<Comparison>> {
    let mut rows = dirs
        .iter()
        .map(|dir| {
            let curve = read_exploitability(&dir.join(EXPLOITABILITY_CSV))?;
            let last = *curve.last().ok_or_else(|| {
                Error::MissingArtifact(format!("{} has no rows", dir.join(EXPLOITABILITY_CSV).display()))
            })?;
            Ok(Comparison {
                dir: dir.clone(),
                iterations: curve.len(),
                final_exploitability: last,
                best_exploitability: curve.iter().copied().fold(f64::INFINITY, f64::min),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.final_exploitability.total_cmp(&b.final_exploitability).then_with(|| a.dir.cmp(&b.dir)));
    Ok(rows)
}

/// Run directories below `root`: every directory holding a manifest.
pub fn find_runs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut found = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        if dir.join(MANIFEST).is_file() {
            found.push(dir.clone());
        }
        if dir.is_dir() {
            for entry in std::fs::read_dir(&dir)? {
                let path = entry?.path();
                if path.is_dir() {
                    stack.push(path);
                }
            }
        }
    }
    found.sort();
    Ok(found)
}
