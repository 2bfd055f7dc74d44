use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use coopcraft::{rollout, RolloutSummary, Variant};
use serde_json::json;

use crate::{CliError, EnvArgs};

#[derive(Debug, Args)]
pub struct RolloutArgs {
    /// `random`, `noop`, `scripted:trio` or `scripted:<role>,<role>,...`.
    #[arg(long, default_value = "random")]
    policy: String,
    #[arg(long, env = "COOPCRAFT_SEED", default_value_t = 0)]
    seed: u64,
    /// Write a JSON-lines replay to this path.
    #[arg(long, value_name = "FILE")]
    record: Option<PathBuf>,
    /// Stop after this many steps even if the episode is still running.
    #[arg(long)]
    steps: Option<u64>,
    /// Print the summary as one JSON object.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    env: EnvArgs,
}

pub fn run(args: &RolloutArgs) -> Result<(), CliError> {
    let cfg = args.env.build(Variant::Coop, 3)?;
    let summary = match &args.record {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
            rollout(&cfg, args.seed, &args.policy, args.steps, Some(BufWriter::new(f)))?
        }
        None => rollout::<File>(&cfg, args.seed, &args.policy, args.steps, None)?,
    };
    if args.json {
        println!("{}", to_json(&summary, &args.policy, args.seed));
    } else {
        print_summary(&summary, &args.policy, args.seed);
    }
    Ok(())
}

fn to_json(s: &RolloutSummary, policy: &str, seed: u64) -> serde_json::Value {
    json!({
        "policy": policy,
        "seed": seed,
        "steps": s.steps,
        "returns": s.returns,
        "team_return": s.team_return(),
        "max_total": s.max_total,
        "percent_of_max": s.percent_of_max(),
        "score_percent": s.score_percent,
        "achievements": s.achievements,
        "trades": s.trades,
        "deaths": s.deaths,
        "revives": s.revives,
        "state_hash": format!("{:016x}", s.state_hash),
    })
}

fn print_summary(s: &RolloutSummary, policy: &str, seed: u64) {
    println!("policy        {policy}");
    println!("seed          {seed}");
    println!("steps         {}", s.steps);
    let per_agent: Vec<String> = s.returns.iter().map(|r| format!("{r:.2}")).collect();
    println!("returns       [{}]", per_agent.join(", "));
    println!(
        "team return   {:.2} / {} ({:.2}% of max)",
        s.team_return(),
        s.max_total,
        s.percent_of_max()
    );
    println!("score         {:.2}%", s.score_percent);
    println!("achievements  {}", s.achievements);
    println!("trades        {}", s.trades);
    println!("deaths        {}", s.deaths);
    println!("revives       {}", s.revives);
    println!("state hash    {:016x}", s.state_hash);
}
