use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use coopcraft::EnvConfig;
use coopcraft_gateway::{router, GatewayConfig};

/// Host live coopcraft sessions over websockets.
#[derive(Debug, Parser)]
#[command(name = "coopcraft-gateway", version)]
struct Args {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Steps per second for every session.
    #[arg(long, default_value_t = 5.0)]
    tick_hz: f32,
    /// key=value environment config for new sessions (default: coop).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, env = "COOPCRAFT_SEED", default_value_t = 0)]
    seed: u64,
    /// Directory for session recordings and replay streaming.
    #[arg(long, default_value = "replays")]
    replay_dir: PathBuf,
    /// Client bundle to serve at `/`.
    #[arg(long, default_value = "static")]
    static_dir: PathBuf,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let env = match &args.config {
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|t| EnvConfig::from_kv_str(&t).map_err(|e| e.to_string()))
        {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
        None => EnvConfig::coop(),
    };
    if args.tick_hz.is_nan() || args.tick_hz <= 0.0 {
        eprintln!("error: --tick-hz must be positive");
        return ExitCode::from(1);
    }
    if let Err(e) = std::fs::create_dir_all(&args.replay_dir) {
        eprintln!("error: {}: {e}", args.replay_dir.display());
        return ExitCode::from(1);
    }
    let cfg = GatewayConfig {
        env,
        seed: args.seed,
        tick_hz: args.tick_hz,
        replay_dir: Some(args.replay_dir),
        static_dir: Some(args.static_dir),
    };
    let addr = SocketAddr::new(args.host, args.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {addr}: {e}");
            return ExitCode::from(1);
        }
    };
    println!("listening on http://{addr} (ws://{addr}/ws)");
    if let Err(e) = axum::serve(listener, router(cfg)).await {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
