use std::time::Instant;

use clap::Args;
use coopcraft::{ActionId, BatchEnv, EnvConfig, RngState, Variant};
use serde::Serialize;

use crate::{CliError, EnvArgs};

/// Env counts visited by `--sweep`.
pub const SWEEP: [usize; 5] = [1, 8, 64, 512, 4096];

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Parallel environments.
    #[arg(long, default_value_t = 64)]
    envs: usize,
    /// Batched steps to time.
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Run every env count in 1, 8, 64, 512, 4096 instead of `--envs`.
    #[arg(long)]
    sweep: bool,
    /// Print CSV rows instead of a table.
    #[arg(long)]
    csv: bool,
    /// Base seed; environment `i` uses `seed + i`.
    #[arg(long, env = "COOPCRAFT_SEED", default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    env: EnvArgs,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub envs: usize,
    pub agents: usize,
    pub threads: usize,
    pub steps: u64,
    pub env_steps: u64,
    pub agent_steps: u64,
    pub seconds: f64,
    pub env_steps_per_sec: f64,
    pub agent_steps_per_sec: f64,
}

/// Steps `envs` environments `steps` times with uniform random actions.
pub fn measure(cfg: &EnvConfig, envs: usize, steps: u64, threads: usize, seed: u64) -> Result<BenchRow, CliError> {
    if envs == 0 {
        return Err(CliError::User("--envs must be at least 1".into()));
    }
    let seeds: Vec<u64> = (0..envs as u64).map(|i| seed.wrapping_add(i)).collect();
    let mut batch = BatchEnv::new(cfg.clone(), &seeds, threads)?;
    let n_actions = batch.env(0).action_space().len() as u32;
    let agents = cfg.n_agents;
    let mut rng = RngState::new(seed).split(coopcraft::rng::tags::POLICY);
    let mut actions = vec![ActionId(0); envs * agents];

    let start = Instant::now();
    for _ in 0..steps {
        for a in actions.iter_mut() {
            *a = ActionId(rng.below(n_actions) as u16);
        }
        batch.step(&actions)?;
    }
    let seconds = start.elapsed().as_secs_f64().max(1e-9);
    let env_steps = envs as u64 * steps;
    let agent_steps = env_steps * agents as u64;
    Ok(BenchRow {
        envs,
        agents,
        threads,
        steps,
        env_steps,
        agent_steps,
        seconds,
        env_steps_per_sec: env_steps as f64 / seconds,
        agent_steps_per_sec: agent_steps as f64 / seconds,
    })
}

pub fn run(args: &BenchArgs) -> Result<(), CliError> {
    let cfg = args.env.build(Variant::Ma, 4)?;
    let threads = args
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if threads == 0 {
        return Err(CliError::User("--threads must be at least 1".into()));
    }
    let counts: Vec<usize> = if args.sweep { SWEEP.to_vec() } else { vec![args.envs] };

    if args.csv {
        println!("envs,agents,threads,steps,env_steps,agent_steps,seconds,env_steps_per_sec,agent_steps_per_sec");
    } else {
        println!(
            "raw environment stepping, random policy, no learner ({} variant)",
            cfg.variant
        );
        println!(
            "{:>6} {:>6} {:>7} {:>7} {:>12} {:>12} {:>9} {:>14} {:>16}",
            "envs", "agents", "threads", "steps", "env_steps", "agent_steps", "seconds", "env_steps/s", "agent_steps/s"
        );
    }
    for n in counts {
        let r = measure(&cfg, n, args.steps, threads, args.seed)?;
        if args.csv {
            println!(
                "{},{},{},{},{},{},{:.6},{:.1},{:.1}",
                r.envs,
                r.agents,
                r.threads,
                r.steps,
                r.env_steps,
                r.agent_steps,
                r.seconds,
                r.env_steps_per_sec,
                r.agent_steps_per_sec
            );
        } else {
            println!(
                "{:>6} {:>6} {:>7} {:>7} {:>12} {:>12} {:>9.3} {:>14.0} {:>16.0}",
                r.envs,
                r.agents,
                r.threads,
                r.steps,
                r.env_steps,
                r.agent_steps,
                r.seconds,
                r.env_steps_per_sec,
                r.agent_steps_per_sec
            );
        }
    }
    Ok(())
}
