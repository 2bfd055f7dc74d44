use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coopcraft::{EnvConfig, Error, Variant};

mod bench;
mod rollout;
mod verify;

/// Deterministic multi-agent survival-crafting environment tools.
#[derive(Debug, Parser)]
#[command(name = "coopcraft", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measure raw batched stepping throughput under a random policy.
    Bench(bench::BenchArgs),
    /// Play one episode with a random or scripted team.
    Rollout(rollout::RolloutArgs),
    /// Re-simulate a recorded episode and check it step by step.
    Replay(verify::ReplayArgs),
}

/// Options shared by commands that build an environment.
#[derive(Debug, Clone, Args)]
pub struct EnvArgs {
    /// key=value config file applied before the other flags.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// `ma` or `coop`.
    #[arg(long)]
    pub variant: Option<Variant>,
    /// Agents per environment.
    #[arg(long)]
    pub agents: Option<usize>,
    /// Episode step limit.
    #[arg(long)]
    pub max_episode_steps: Option<u64>,
}

impl EnvArgs {
    pub fn build(&self, default_variant: Variant, default_agents: usize) -> Result<EnvConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
                EnvConfig::from_kv_str(&text)?
            }
            None => match self.variant.unwrap_or(default_variant) {
                Variant::Coop => EnvConfig::coop(),
                Variant::Ma => EnvConfig::ma(default_agents),
            },
        };
        if let Some(v) = self.variant {
            if v != cfg.variant {
                cfg = match v {
                    Variant::Coop => EnvConfig {
                        variant: v,
                        n_agents: 3,
                        ..cfg
                    },
                    Variant::Ma => EnvConfig { variant: v, ..cfg },
                };
            }
        }
        if let Some(n) = self.agents {
            cfg.n_agents = n;
        }
        if let Some(m) = self.max_episode_steps {
            cfg.max_episode_steps = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable input, unknown policy.
    User(String),
    /// A replay that does not reproduce.
    Verification(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::CorruptReplay { .. } | Error::VersionMismatch { .. } => CliError::Verification(e.to_string()),
            other => CliError::User(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Bench(a) => bench::run(&a),
        Command::Rollout(a) => rollout::run(&a),
        Command::Replay(a) => verify::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Verification(msg)) => {
            eprintln!("FAIL {msg}");
            ExitCode::from(2)
        }
    }
}
