use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use super::config::ExperimentConfig;
use crate::env::Environment;
use crate::error::{Error, Result};
use crate::exact::SolverTrace;
use crate::types::{MeanFieldFlow, Policy};

pub const EXPLOITABILITY_CSV: &str = "exploitability.csv";
pub const FLOW_CSV: &str = "flow.csv";
pub const POLICY_CSV: &str = "policy.csv";
pub const MANIFEST: &str = "manifest.txt";

pub fn write_exploitability(path: &Path, trace: &SolverTrace, wall_time: bool) -> Result<()> {
    let mut s = String::from("iteration,exploitability,wall_seconds\n");
    for (k, (e, t)) in trace.exploitability.iter().zip(&trace.elapsed).enumerate() {
        let t = if wall_time { *t } else { 0.0 };
        writeln!(s, "{},{},{}", k + 1, e, t).unwrap();
    }
    Ok(std::fs::write(path, s)?)
}

pub fn read_exploitability(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|_| Error::MissingArtifact(path.display().to_string()))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.starts_with("iteration,exploitability") => {}
        _ => return Err(Error::MissingArtifact(format!("{}: unexpected header", path.display()))),
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split(',')
                .nth(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::MissingArtifact(format!("{}: bad row `{l}`", path.display())))
        })
        .collect()
}

fn flow_csv(rows: impl Iterator<Item = (usize, usize, f64)>) -> String {
    let mut s = String::from("n,state,mass\n");
    for (n, x, m) in rows {
        writeln!(s, "{n},{x},{m}").unwrap();
    }
    s
}

/// `flow.csv` over the full state space, plus one `flow_pop{i}.csv` per
/// population with masses renormalized inside the population.
pub fn write_flows(dir: &Path, flow: &MeanFieldFlow, env: &dyn Environment) -> Result<()> {
    let all = flow.iter().enumerate().flat_map(|(n, d)| d.as_slice().iter().enumerate().map(move |(x, m)| (n, x, *m)));
    std::fs::write(dir.join(super::FLOW_CSV), flow_csv(all))?;
    let pops = env.num_populations();
    if pops > 1 {
        let states = env.num_states();
        for p in 0..pops {
            let owned: Vec<usize> = (0..states).filter(|&x| env.population_of(x) == p).collect();
            let total: f64 = owned.iter().map(|&x| flow.at(0).get(x)).sum();
            let rows = flow
                .iter()
                .enumerate()
                .flat_map(|(n, d)| owned.iter().enumerate().map(move |(i, &x)| (n, i, d.get(x) / total)));
            std::fs::write(dir.join(format!("flow_pop{p}.csv")), flow_csv(rows))?;
        }
    }
    Ok(())
}

pub fn write_policy(path: &Path, policy: &Policy) -> Result<()> {
    let shape = policy.shape();
    let mut s = String::from("n,state,action,prob\n");
    for n in 0..shape.steps {
        for x in 0..shape.states {
            for (a, p) in policy.row(n, x).iter().enumerate() {
                writeln!(s, "{n},{x},{a},{p}").unwrap();
            }
        }
    }
    Ok(std::fs::write(path, s)?)
}

pub fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

pub fn write_manifest(path: &Path, cfg: &ExperimentConfig, trace: &SolverTrace) -> Result<()> {
    let mut s = String::new();
    for (k, v) in cfg.flattened() {
        writeln!(s, "{k} = {v}").unwrap();
    }
    writeln!(s, "seed = {}", cfg.solver.seed).unwrap();
    writeln!(s, "git_describe = {}", git_describe()).unwrap();
    writeln!(s, "iterations = {}", trace.iterations()).unwrap();
    writeln!(s, "final_exploitability = {}", trace.final_exploitability()).unwrap();
    Ok(std::fs::write(path, s)?)
}

/// Parses `key = value` lines back into pairs.
pub fn read_manifest(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|_| Error::MissingArtifact(path.display().to_string()))?;
    Ok(text.lines().filter_map(|l| l.split_once(" = ")).map(|(k, v)| (k.to_string(), v.to_string())).collect())
}
