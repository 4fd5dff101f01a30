use std::path::Path;
use std::process::{Command, Output};

use mfg::experiment::{compare, read_manifest, run, sweep, ExperimentConfig};
use mfg::Error;

const BIN: &str = env!("CARGO_BIN_EXE_mfg-suite");

fn suite(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("MFG_SUITE_OUT").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SIS_OMD: &str =
    "[environment]\nname = \"sis\"\n[solver]\nname = \"omd\"\ntau = 1.0\niterations = 300\nseed = 0\n";

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", SIS_OMD);
    let out = dir.path().join("run");
    let o = suite(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = std::fs::read_to_string(out.join("exploitability.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iteration,exploitability,wall_seconds"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 300);
    for (k, row) in rows.iter().enumerate() {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f[0], (k + 1).to_string());
        assert!(f[1].parse::<f64>().unwrap().is_finite());
    }

    let flow = std::fs::read_to_string(out.join("flow.csv")).unwrap();
    assert!(flow.starts_with("n,state,mass\n"));
    assert_eq!(flow.lines().count(), 1 + 51 * 2);

    let manifest = read_manifest(&out.join("manifest.txt")).unwrap();
    let get = |k: &str| manifest.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    assert_eq!(get("solver.name").as_deref(), Some("omd"));
    assert_eq!(get("environment.name").as_deref(), Some("sis"));
    assert_eq!(get("seed").as_deref(), Some("0"));
    assert!(get("git_describe").is_some());
}

#[test]
fn equal_seeds_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[environment]\nname = \"sis\"\nn_t = 10\n[solver]\nname = \"d_momd\"\niterations = 3\ninner_steps = 100\n[neural]\nhidden = [8]\n",
    );
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = suite(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "5"]);
        assert!(o.status.success());
    }
    for f in ["exploitability.csv", "flow.csv", "policy.csv"] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn zero_iterations_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[environment]\nname = \"toy\"\n[solver]\nname = \"omd\"\niterations = 0\n");
    let o = suite(&["run", "--config", &cfg, "--out", dir.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("solver.iterations"), "{err}");
    assert!(!dir.path().join("r").exists());
}

#[test]
fn bad_field_paths_are_reported() {
    for (text, path) in [
        ("[environment]\nname = \"toy\"\n[solver]\nname = \"omd\"\ntau = -1.0\n", "solver.tau"),
        ("[environment]\nname = \"toy\"\n[solver]\nname = \"nope\"\n", "solver.name"),
        ("[environment]\nname = \"sis\"\nrecovery = \"high\"\n[solver]\nname = \"omd\"\n", "environment"),
        (
            "[environment]\nname = \"toy\"\n[solver]\nname = \"omd\"\n[neural]\ntarget_update = 0\n",
            "neural.target_update",
        ),
        ("[environment]\nname = \"toy\"\n[solver]\niterations = 3\n", "solver.name"),
    ] {
        match ExperimentConfig::from_toml(text) {
            Err(Error::Config { path: p, .. }) => assert!(p.starts_with(path), "{p} vs {path}"),
            other => panic!("{text}: {other:?}"),
        }
    }
}

#[test]
fn sweep_builds_a_keyed_tree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "[environment]\nname = \"toy\"\n[solver]\nname = \"d_momd\"\niterations = 2\ninner_steps = 50\n\
         [neural]\nhidden = [4]\n[sweep]\ntau = [0.01, 0.1, 1.0]\nalpha = [0.9, 0.99]\nlr = [0.001, 0.0001]\n",
    );
    let out = dir.path().join("sweep");
    let o = suite(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--jobs", "3", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let runs: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(runs.as_array().unwrap().len(), 12);
    for tau in ["0.01", "0.1", "1"] {
        for alpha in ["0.9", "0.99"] {
            for lr in ["0.001", "0.0001"] {
                let leaf = out
                    .join("solver=d_momd")
                    .join(format!("tau={tau}"))
                    .join(format!("alpha={alpha}"))
                    .join(format!("lr={lr}"));
                assert!(leaf.join("exploitability.csv").is_file(), "{}", leaf.display());
                let m = read_manifest(&leaf.join("manifest.txt")).unwrap();
                assert!(m.contains(&("solver.tau".into(), if tau == "1" { "1.0".into() } else { tau.into() })));
            }
        }
    }
}

#[test]
fn sweep_is_independent_of_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml(
        "[environment]\nname = \"toy\"\n[solver]\nname = \"d_momd\"\niterations = 2\ninner_steps = 50\n\
         [neural]\nhidden = [4]\n[sweep]\nseed = [1, 2, 3]\n",
    )
    .unwrap();
    let a = sweep(&cfg, &dir.path().join("one"), 1).unwrap();
    let b = sweep(&cfg, &dir.path().join("three"), 3).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.final_exploitability, y.final_exploitability);
        let fa = std::fs::read(x.dir.join("exploitability.csv")).unwrap();
        let fb = std::fs::read(y.dir.join("exploitability.csv")).unwrap();
        assert_eq!(fa, fb);
    }
}

#[test]
fn compare_ranks_and_reports_missing_runs() {
    let dir = tempfile::tempdir().unwrap();
    let base = "[environment]\nname = \"sis\"\n[solver]\niterations = 30\n";
    for solver in ["omd", "bp", "fp"] {
        let cfg = ExperimentConfig::from_toml(&base.replace("[solver]\n", &format!("[solver]\nname = \"{solver}\"\n")))
            .unwrap();
        run(&cfg, &dir.path().join(solver)).unwrap();
    }
    let root = dir.path().to_str().unwrap();
    let o = suite(&["compare", "--out", root, "--json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let finals: Vec<f64> =
        rows.as_array().unwrap().iter().map(|r| r["final_exploitability"].as_f64().unwrap()).collect();
    assert_eq!(finals.len(), 3);
    assert!(finals.windows(2).all(|w| w[0] <= w[1]));

    let one = suite(&["compare", dir.path().join("omd").to_str().unwrap()]);
    assert!(one.status.success());
    assert_eq!(String::from_utf8_lossy(&one.stdout).lines().count(), 2);

    let o = suite(&["compare", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing artifact"));
    assert!(matches!(compare(&[dir.path().join("missing")]), Err(Error::MissingArtifact(_))));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[environment]\nname = \"toy\"\n[solver]\nname = \"momd\"\niterations = 5\n");
    let out = dir.path().join("from_env");
    let o = Command::new(BIN).args(["run", "--config", &cfg]).env("MFG_SUITE_OUT", &out).output().unwrap();
    assert!(o.status.success());
    assert!(out.join("exploitability.csv").is_file());
}

#[test]
fn wall_time_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[environment]\nname = \"lq\"\n[solver]\nname = \"omd\"\niterations = 5\n");
    let out = dir.path().join("r");
    assert!(suite(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--wall-time"]).status.success());
    let csv = std::fs::read_to_string(out.join("exploitability.csv")).unwrap();
    let last: f64 = csv.lines().last().unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(last > 0.0);
}

#[test]
fn multipop_runs_write_population_flows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_toml(
        "[environment]\nname = \"multipop\"\nn_t = 6\n[solver]\nname = \"omd\"\ntau = 30.0\niterations = 3\n",
    )
    .unwrap();
    let out = dir.path().join("mp");
    run(&cfg, &out).unwrap();
    for p in 0..3 {
        let text = std::fs::read_to_string(out.join(format!("flow_pop{p}.csv"))).unwrap();
        let mut per_n = [0.0f64; 7];
        for line in text.lines().skip(1) {
            let f: Vec<&str> = line.split(',').collect();
            per_n[f[0].parse::<usize>().unwrap()] += f[2].parse::<f64>().unwrap();
        }
        assert!(per_n.iter().all(|s| (s - 1.0).abs() < 1e-9), "{per_n:?}");
    }
}

#[test]
fn every_environment_and_solver_runs_from_config() {
    let envs = [
        "name = \"toy\"",
        "name = \"sis\"\nn_t = 5",
        "name = \"lq\"\nn_t = 3",
        "name = \"four_rooms\"\nn_t = 4",
        "name = \"maze\"\nn_t = 4\ndistance = \"shortest_path\"",
        "name = \"multipop\"\nn_t = 4",
    ];
    let solvers = ["bp", "fp", "pi", "omd", "momd", "bi", "d_afp", "d_momd", "d_bp", "d_pi", "d_bi"];
    let dir = tempfile::tempdir().unwrap();
    for (i, e) in envs.iter().enumerate() {
        for s in solvers {
            let text = format!(
                "[environment]\n{e}\n[solver]\nname = \"{s}\"\niterations = 2\ninner_steps = 20\n[neural]\nhidden = [4]\navg_steps = 5\navg_episodes = 1\n"
            );
            let cfg = ExperimentConfig::from_toml(&text).unwrap();
            let summary = run(&cfg, &dir.path().join(format!("{i}-{s}"))).unwrap();
            assert_eq!(summary.iterations, 2);
            assert!(summary.final_exploitability.is_finite() && summary.final_exploitability >= -1e-9);
        }
    }
}

#[test]
fn custom_map_files_load() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "tiny.map", "#####\n#1..#\n#..R#\n#####\n");
    let cfg = ExperimentConfig::from_toml(&format!(
        "[environment]\nname = \"maze\"\nn_t = 3\nmap = \"{map}\"\n[solver]\nname = \"omd\"\niterations = 2\n"
    ))
    .unwrap();
    assert_eq!(cfg.environment.build().unwrap().num_states(), 20);
    let bad = ExperimentConfig::from_toml(
        "[environment]\nname = \"four_rooms\"\nmap = \"/nonexistent/x.map\"\n[solver]\nname = \"omd\"\n",
    )
    .unwrap();
    assert!(bad.environment.build().is_err());
}

#[test]
fn bundled_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.environment.build().unwrap();
        seen += 1;
    }
    assert!(seen >= 5);
}
