use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;
use coopcraft::Replay;

use crate::CliError;

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Replay file to re-simulate.
    #[arg(long, value_name = "FILE")]
    verify: PathBuf,
}

pub fn run(args: &ReplayArgs) -> Result<(), CliError> {
    let path = &args.verify;
    let f = File::open(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))?;
    let replay = Replay::read(BufReader::new(f))?;
    let v = replay.verify()?;
    match v.divergence {
        None => {
            println!("OK {} steps, state {}", v.steps, replay.footer.state_hash);
            Ok(())
        }
        Some(d) => Err(CliError::Verification(d.to_string())),
    }
}
