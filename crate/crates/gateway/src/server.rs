use std::collections::BTreeMap;
use std::fs::File;
use std::hash::Hasher;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::{Json, Router};
use coopcraft::world::Fnv64;
use coopcraft::{Env, EnvConfig, Replay};
use futures::{SinkExt, StreamExt};
use tokio::sync::mpsc::{self, UnboundedSender};
use tokio::sync::oneshot;
use tower_http::services::ServeDir;

use crate::protocol::{ClientMsg, ErrorCode, ServerMsg};
use crate::session::{manifests, ConnId, Phase, Session, SessionInfo};
use crate::view::{build, Summary, Tally};

#[derive(Debug, Clone)]
pub struct GatewayConfig {
    /// Config every new session starts from.
    pub env: EnvConfig,
    /// Mixed with the session id to seed each session.
    pub seed: u64,
    pub tick_hz: f32,
    /// Where sessions are recorded and replays are read from.
    pub replay_dir: Option<PathBuf>,
    /// Client bundle served at `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        Self {
            env: EnvConfig::coop(),
            seed: 0,
            tick_hz: 5.0,
            replay_dir: None,
            static_dir: None,
        }
    }
}

enum Cmd {
    Join {
        conn: ConnId,
        seat: Option<usize>,
        out: UnboundedSender<ServerMsg>,
        reply: oneshot::Sender<Result<usize, ErrorCode>>,
    },
    Action {
        conn: ConnId,
        id: u16,
    },
    Start {
        conn: ConnId,
    },
    Leave {
        conn: ConnId,
    },
}

#[derive(Clone)]
struct SessionHandle {
    tx: UnboundedSender<Cmd>,
    info: Arc<Mutex<SessionInfo>>,
}

#[derive(Clone)]
struct AppState {
    cfg: Arc<GatewayConfig>,
    sessions: Arc<Mutex<BTreeMap<String, SessionHandle>>>,
    next_conn: Arc<AtomicU64>,
}

/// Seed of the session called `id`.
pub fn session_seed(base: u64, id: &str) -> u64 {
    let mut h = Fnv64::default();
    h.write(id.as_bytes());
    base ^ h.finish()
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

pub fn router(cfg: GatewayConfig) -> Router {
    let static_dir = cfg.static_dir.clone();
    let state = AppState {
        cfg: Arc::new(cfg),
        sessions: Arc::default(),
        next_conn: Arc::new(AtomicU64::new(1)),
    };
    let app = Router::new()
        .route("/ws", get(ws_handler))
        .route("/sessions", get(list_sessions))
        .with_state(state);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

async fn list_sessions(State(app): State<AppState>) -> Json<Vec<SessionInfo>> {
    let sessions = app.sessions.lock().unwrap();
    Json(sessions.values().map(|h| h.info.lock().unwrap().clone()).collect())
}

async fn ws_handler(ws: WebSocketUpgrade, State(app): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, app))
}

impl AppState {
    fn session(&self, id: &str) -> Result<SessionHandle, String> {
        let mut sessions = self.sessions.lock().unwrap();
        if let Some(h) = sessions.get(id) {
            return Ok(h.clone());
        }
        let replay = self.cfg.replay_dir.as_ref().map(|d| d.join(format!("{id}.jsonl")));
        let session = Session::new(
            id,
            self.cfg.env.clone(),
            session_seed(self.cfg.seed, id),
            self.cfg.tick_hz,
            replay,
        )
        .map_err(|e| e.to_string())?;
        let (tx, rx) = mpsc::unbounded_channel();
        let info = Arc::new(Mutex::new(session.info()));
        tokio::spawn(run_session(session, rx, info.clone()));
        let h = SessionHandle { tx, info };
        sessions.insert(id.to_string(), h.clone());
        Ok(h)
    }
}

/// Drives one session: commands arrive through a single queue and are
/// applied between ticks.
async fn run_session(mut session: Session, mut rx: mpsc::UnboundedReceiver<Cmd>, info: Arc<Mutex<SessionInfo>>) {
    let period = Duration::from_secs_f32(1.0 / session.info().tick_hz.max(0.01));
    let mut ticker = tokio::time::interval(period);
    ticker.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        let running = session.phase() == Phase::Running;
        tokio::select! {
            cmd = rx.recv() => {
                let Some(cmd) = cmd else { break };
                match cmd {
                    Cmd::Join { conn, seat, out, reply } => {
                        let _ = reply.send(session.join(conn, seat, out));
                    }
                    Cmd::Action { conn, id } => {
                        let _ = session.submit(conn, id);
                    }
                    Cmd::Start { conn } => {
                        if session.start(conn).is_ok() {
                            ticker.reset();
                        }
                    }
                    Cmd::Leave { conn } => session.leave(conn),
                }
            }
            _ = ticker.tick(), if running => {
                if session.tick().is_err() {
                    break;
                }
            }
        }
        *info.lock().unwrap() = session.info();
        if session.phase() == Phase::Finished && !session.has_humans() {
            break;
        }
    }
}

async fn connection(socket: WebSocket, app: AppState) {
    let (mut sink, mut stream) = socket.split();
    let (out, mut out_rx) = mpsc::unbounded_channel::<ServerMsg>();
    let writer = tokio::spawn(async move {
        while let Some(msg) = out_rx.recv().await {
            let text = serde_json::to_string(&msg).expect("server messages serialize");
            if sink.send(Message::Text(text.into())).await.is_err() {
                break;
            }
        }
    });
    let conn = app.next_conn.fetch_add(1, Ordering::Relaxed);
    let mut joined: Option<UnboundedSender<Cmd>> = None;
    let err = |code, msg: String| {
        let _ = out.send(ServerMsg::error(code, msg));
    };

    while let Some(Ok(msg)) = stream.next().await {
        let text = match msg {
            Message::Text(t) => t,
            Message::Close(_) => break,
            Message::Binary(_) => {
                err(ErrorCode::Malformed, "binary frames are not supported".into());
                continue;
            }
            _ => continue,
        };
        let parsed: ClientMsg = match serde_json::from_str(text.as_str()) {
            Ok(m) => m,
            Err(e) => {
                err(ErrorCode::Malformed, e.to_string());
                continue;
            }
        };
        match parsed {
            ClientMsg::Join { session, seat } => {
                if joined.is_some() {
                    err(ErrorCode::AlreadyJoined, "already seated".into());
                    continue;
                }
                if !valid_id(&session) {
                    err(ErrorCode::BadSession, format!("invalid session id `{session}`"));
                    continue;
                }
                let handle = match app.session(&session) {
                    Ok(h) => h,
                    Err(e) => {
                        err(ErrorCode::BadSession, e);
                        continue;
                    }
                };
                let (reply, answer) = oneshot::channel();
                let cmd = Cmd::Join {
                    conn,
                    seat,
                    out: out.clone(),
                    reply,
                };
                if handle.tx.send(cmd).is_err() {
                    err(ErrorCode::Finished, format!("session `{session}` has ended"));
                    continue;
                }
                match answer.await {
                    Ok(Ok(_)) => joined = Some(handle.tx),
                    Ok(Err(code)) => err(code, format!("cannot join `{session}`")),
                    Err(_) => err(ErrorCode::Finished, format!("session `{session}` has ended")),
                }
            }
            ClientMsg::Action { id } => match &joined {
                Some(tx) => {
                    if tx.send(Cmd::Action { conn, id }).is_err() {
                        err(ErrorCode::Finished, "session has ended".into());
                    }
                }
                None => err(ErrorCode::NotJoined, "join a session first".into()),
            },
            ClientMsg::Start => match &joined {
                Some(tx) => {
                    if tx.send(Cmd::Start { conn }).is_err() {
                        err(ErrorCode::Finished, "session has ended".into());
                    }
                }
                None => err(ErrorCode::NotJoined, "join a session first".into()),
            },
            ClientMsg::RequestReplay { file, seat, speed } => {
                let dir = app.cfg.replay_dir.clone();
                let speed = speed.unwrap_or(app.cfg.tick_hz);
                tokio::spawn(stream_replay(dir, file, seat, speed, out.clone()));
            }
        }
    }
    if let Some(tx) = joined {
        let _ = tx.send(Cmd::Leave { conn });
    }
    drop(out);
    let _ = writer.await;
}

fn replay_path(dir: Option<&Path>, file: &str) -> Option<PathBuf> {
    let ok = !file.is_empty() && !file.contains(['/', '\\']) && !file.starts_with('.');
    dir.filter(|_| ok).map(|d| d.join(file))
}

/// Re-simulates `file` and sends `seat`'s view of every step.
async fn stream_replay(dir: Option<PathBuf>, file: String, seat: usize, speed: f32, out: UnboundedSender<ServerMsg>) {
    let err = |code, msg: String| {
        let _ = out.send(ServerMsg::error(code, msg));
    };
    let Some(path) = replay_path(dir.as_deref(), &file) else {
        return err(ErrorCode::ReplayNotFound, format!("no replay `{file}`"));
    };
    let replay = match File::open(&path) {
        Ok(f) => match Replay::read(BufReader::new(f)) {
            Ok(r) => r,
            Err(e) => return err(ErrorCode::BadReplay, e.to_string()),
        },
        Err(_) => return err(ErrorCode::ReplayNotFound, format!("no replay `{file}`")),
    };
    let mut env = match Env::new(replay.header.config.clone(), replay.header.seed) {
        Ok(e) => e,
        Err(e) => return err(ErrorCode::BadReplay, e.to_string()),
    };
    if seat >= env.n_agents() {
        return err(ErrorCode::BadSeat, format!("replay has {} seats", env.n_agents()));
    }
    let send = |m| out.send(m).is_ok();
    let hello = ServerMsg::Hello {
        session: format!("replay:{file}"),
        seat,
        manifests: manifests(&env, speed),
    };
    let first = ServerMsg::State {
        step: 0,
        view: Box::new(build(&env, seat, None)),
    };
    if !send(hello) || !send(first) {
        return;
    }
    let delay = (speed > 0.0).then(|| Duration::from_secs_f32(1.0 / speed));
    let mut tally = Tally::new(env.n_agents());
    for rec in &replay.steps {
        let t = match env.step_raw(&rec.actions) {
            Ok(t) => t,
            Err(e) => return err(ErrorCode::BadReplay, format!("step {}: {e}", rec.step)),
        };
        if t.rewards != rec.rewards || t.info.events != rec.events {
            return err(ErrorCode::BadReplay, format!("step {} does not reproduce", rec.step));
        }
        tally.record(&t);
        let msg = ServerMsg::State {
            step: env.state().time,
            view: Box::new(build(&env, seat, Some(&t))),
        };
        if !send(msg) {
            return;
        }
        if let Some(d) = delay {
            tokio::time::sleep(d).await;
        }
    }
    send(ServerMsg::Done {
        summary: Summary::new(&env, &tally),
    });
}
