use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn coopcraft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopcraft"))
        .args(args)
        .env_remove("COOPCRAFT_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("coopcraft-cli-{}-{name}", std::process::id()))
}

fn rollout_json(args: &[&str]) -> Value {
    let mut full = vec!["rollout", "--json"];
    full.extend_from_slice(args);
    let o = coopcraft(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(stdout(&o).trim()).unwrap()
}

#[test]
fn bench_accounting() {
    let o = coopcraft(&[
        "bench",
        "--envs",
        "1",
        "--steps",
        "1000",
        "--agents",
        "4",
        "--csv",
        "--threads",
        "1",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let field = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(field("env_steps"), "1000");
    assert_eq!(field("agent_steps"), "4000");
    assert!(lines.next().is_none());
}

#[test]
fn bench_sweep_lists_every_size() {
    let o = coopcraft(&[
        "bench",
        "--sweep",
        "--steps",
        "2",
        "--csv",
        "--threads",
        "1",
        "--agents",
        "1",
    ]);
    assert!(o.status.success());
    let envs: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(envs, ["1", "8", "64", "512", "4096"]);
}

#[test]
fn random_coop_rollout_sanity() {
    let v = rollout_json(&["--policy", "random", "--seed", "3", "--steps", "400"]);
    assert!(v["steps"].as_u64().unwrap() <= 400);
    assert!(v["team_return"].as_f64().unwrap() >= 0.0);
    assert!(v["trades"].as_u64().is_some());
    assert_eq!(v["max_total"], 581.0);
    let pct = v["percent_of_max"].as_f64().unwrap();
    let ret = v["team_return"].as_f64().unwrap();
    assert!((pct - 100.0 * ret / 581.0).abs() < 1e-3);
}

#[test]
fn scripted_trio_trades_and_forges_a_sword() {
    let path = tmp("trio.jsonl");
    let v = rollout_json(&[
        "--policy",
        "scripted:trio",
        "--seed",
        "0",
        "--steps",
        "2000",
        "--record",
        path.to_str().unwrap(),
    ]);
    assert!(v["trades"].as_u64().unwrap() >= 1);
    let text = std::fs::read_to_string(&path).unwrap();
    let footer: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    let unlocked: Vec<&str> = footer["achievements"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|a| a.as_array().unwrap().iter().map(|n| n.as_str().unwrap()))
        .collect();
    assert!(unlocked.contains(&"MAKE_STONE_SWORD"), "{unlocked:?}");
    std::fs::remove_file(path).ok();
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_coopcraft"));
        cmd.args(["rollout", "--json", "--steps", "50"])
            .env_remove("COOPCRAFT_SEED");
        if let Some(s) = seed {
            cmd.env("COOPCRAFT_SEED", s);
        }
        let v: Value = serde_json::from_slice(&cmd.output().unwrap().stdout).unwrap();
        (
            v["seed"].as_u64().unwrap(),
            v["state_hash"].as_str().unwrap().to_string(),
        )
    };
    assert_eq!(run(None).0, 0);
    let (seed, hash) = run(Some("41"));
    assert_eq!(seed, 41);
    let explicit = rollout_json(&["--steps", "50", "--seed", "41"]);
    assert_eq!(explicit["state_hash"].as_str().unwrap(), hash);
}

#[test]
fn config_file_is_applied() {
    let path = tmp("small.kv");
    std::fs::write(&path, "variant = ma\nn_agents = 2\nmax_episode_steps = 30\n").unwrap();
    let v = rollout_json(&["--config", path.to_str().unwrap(), "--policy", "noop"]);
    assert_eq!(v["returns"].as_array().unwrap().len(), 2);
    assert_eq!(v["steps"], 30);

    std::fs::write(&path, "variant = ma\nn_agents = lots\n").unwrap();
    let o = coopcraft(&["rollout", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    std::fs::remove_file(path).ok();
}

#[test]
fn replay_verify_ok_and_tampered() {
    let path = tmp("verify.jsonl");
    let p = path.to_str().unwrap();
    let o = coopcraft(&[
        "rollout",
        "--policy",
        "scripted:trio",
        "--seed",
        "5",
        "--steps",
        "120",
        "--record",
        p,
    ]);
    assert!(o.status.success());
    let o = coopcraft(&["replay", "--verify", p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("OK 120 steps"));

    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut step: Value = serde_json::from_str(&lines[13]).unwrap();
    assert_eq!(step["step"], 12);
    let r = step["rewards"][0].as_f64().unwrap();
    step["rewards"][0] = Value::from(r + 0.5);
    lines[13] = step.to_string();
    std::fs::write(&path, lines.join("\n")).unwrap();
    let o = coopcraft(&["replay", "--verify", p]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("step 12") && err.contains("rewards"), "{err}");

    let other = text.replacen(env!("CARGO_PKG_VERSION"), "99.0.0", 1);
    std::fs::write(&path, other).unwrap();
    let o = coopcraft(&["replay", "--verify", p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("99.0.0"));
    std::fs::remove_file(path).ok();
}

#[test]
fn user_errors_exit_one() {
    for args in [
        &["bench", "--envs", "lots"][..],
        &["bench", "--envs", "0", "--steps", "1"],
        &["rollout", "--policy", "greedy"],
        &["rollout", "--variant", "coop", "--agents", "5"],
        &["replay", "--verify", "/nonexistent/replay.jsonl"],
        &["dance"],
    ] {
        let o = coopcraft(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(coopcraft(&["--help"]).status.code(), Some(0));
}
