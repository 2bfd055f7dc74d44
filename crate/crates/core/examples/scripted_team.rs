//! Plays one Coop episode with the scripted trio and prints what happened.
//!
//!     cargo run --release -p coopcraft --example scripted_team -- 7

use coopcraft::{Env, EnvConfig, Event, TeamPolicy};

fn main() -> coopcraft::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = EnvConfig::coop();
    let mut env = Env::new(cfg.clone(), seed)?;
    let mut team = TeamPolicy::parse("scripted:trio", cfg.n_agents, seed)?;
    let space = env.action_space();

    for _ in 0..2000 {
        let actions = team.actions(env.state(), &space);
        let t = env.step_raw(&actions)?;
        for e in &t.info.events {
            match e {
                Event::Trade {
                    giver,
                    receiver,
                    resource,
                } => {
                    println!(
                        "t={:<5} agent {giver} gave {} to agent {receiver}",
                        env.state().time,
                        resource.name()
                    )
                }
                Event::AgentDied { agent } => println!("t={:<5} agent {agent} died", env.state().time),
                Event::Revive { reviver, revived } => {
                    println!("t={:<5} agent {reviver} revived agent {revived}", env.state().time)
                }
                _ => {}
            }
        }
        for (agent, a) in &t.info.achievements {
            println!("t={:<5} agent {agent} unlocked {}", env.state().time, a.name());
        }
        if t.done {
            break;
        }
    }
    println!("score {:.1}% after {} steps", env.score_percent(), env.state().time);
    Ok(())
}
