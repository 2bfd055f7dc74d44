//! One hosted episode: seats, buffered actions and the tick.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use coopcraft::{
    ActionId, ActionSpace, Env, EnvConfig, Footer, Header, Policy, ReplayWriter, Role, ScriptedBot, StepRecord,
    ENGINE_VERSION,
};
use serde::{Deserialize, Serialize};
use tokio::sync::mpsc::UnboundedSender;

use crate::protocol::{ErrorCode, Manifests, ServerMsg};
use crate::view::{build, Summary, Tally};

pub type ConnId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Lobby,
    Running,
    Finished,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Controller {
    Human(ConnId),
    Bot,
}

/// Row of the `GET /sessions` listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub id: String,
    pub phase: Phase,
    pub step: u64,
    pub variant: String,
    /// `human` or `bot` per agent.
    pub seats: Vec<String>,
    pub tick_hz: f32,
}

pub struct Session {
    id: String,
    env: Env,
    space: ActionSpace,
    seed: u64,
    tick_hz: f32,
    seats: Vec<Controller>,
    bots: Vec<ScriptedBot>,
    pending: Vec<Option<ActionId>>,
    conns: BTreeMap<ConnId, (usize, UnboundedSender<ServerMsg>)>,
    phase: Phase,
    tally: Tally,
    log: Vec<Vec<ActionId>>,
    writer: Option<ReplayWriter<BufWriter<File>>>,
}

impl Session {
    /// A lobby with every seat bot-controlled. With `replay` set the episode
    /// is recorded there as it runs.
    pub fn new(id: &str, cfg: EnvConfig, seed: u64, tick_hz: f32, replay: Option<PathBuf>) -> coopcraft::Result<Self> {
        let env = Env::new(cfg.clone(), seed)?;
        let n = env.n_agents();
        let bots = env
            .state()
            .agents
            .iter()
            .map(|a| ScriptedBot::new(Role::for_specialization(a.specialization), seed ^ (a.id as u64 + 1)))
            .collect();
        let writer = match replay {
            Some(path) => Some(ReplayWriter::new(
                BufWriter::new(File::create(path)?),
                &Header::new(&cfg, seed, "gateway"),
            )?),
            None => None,
        };
        Ok(Self {
            id: id.to_string(),
            space: env.action_space(),
            env,
            seed,
            tick_hz,
            seats: vec![Controller::Bot; n],
            bots,
            pending: vec![None; n],
            conns: BTreeMap::new(),
            phase: Phase::Lobby,
            tally: Tally::new(n),
            log: Vec::new(),
            writer,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    /// Direct world access for tooling; edits are not recorded.
    pub fn env_mut(&mut self) -> &mut Env {
        &mut self.env
    }

    pub fn seats(&self) -> &[Controller] {
        &self.seats
    }

    /// Joint actions applied so far, one entry per tick.
    pub fn log(&self) -> &[Vec<ActionId>] {
        &self.log
    }

    pub fn has_humans(&self) -> bool {
        !self.conns.is_empty()
    }

    pub fn manifests(&self) -> Manifests {
        manifests(&self.env, self.tick_hz)
    }

    pub fn info(&self) -> SessionInfo {
        SessionInfo {
            id: self.id.clone(),
            phase: self.phase,
            step: self.env.state().time,
            variant: self.env.config().variant.to_string(),
            seats: self
                .seats
                .iter()
                .map(|c| match c {
                    Controller::Human(_) => "human".to_string(),
                    Controller::Bot => "bot".to_string(),
                })
                .collect(),
            tick_hz: self.tick_hz,
        }
    }

    /// Seats `conn`, sending it `hello` and the current state.
    pub fn join(
        &mut self,
        conn: ConnId,
        seat: Option<usize>,
        out: UnboundedSender<ServerMsg>,
    ) -> Result<usize, ErrorCode> {
        if self.phase == Phase::Finished {
            return Err(ErrorCode::Finished);
        }
        if self.conns.contains_key(&conn) {
            return Err(ErrorCode::AlreadyJoined);
        }
        let seat = match seat {
            Some(s) if s >= self.seats.len() => return Err(ErrorCode::BadSeat),
            Some(s) if self.seats[s] != Controller::Bot => return Err(ErrorCode::SeatTaken),
            Some(s) => s,
            None => self
                .seats
                .iter()
                .position(|c| *c == Controller::Bot)
                .ok_or(ErrorCode::SessionFull)?,
        };
        self.seats[seat] = Controller::Human(conn);
        self.pending[seat] = None;
        let _ = out.send(ServerMsg::Hello {
            session: self.id.clone(),
            seat,
            manifests: self.manifests(),
        });
        let _ = out.send(ServerMsg::State {
            step: self.env.state().time,
            view: Box::new(build(&self.env, seat, None)),
        });
        self.conns.insert(conn, (seat, out));
        Ok(seat)
    }

    /// Frees the seat held by `conn`; a bot takes it over. A running
    /// session with nobody left ends.
    pub fn leave(&mut self, conn: ConnId) {
        if let Some((seat, _)) = self.conns.remove(&conn) {
            self.seats[seat] = Controller::Bot;
            self.pending[seat] = None;
        }
        if self.phase == Phase::Running && self.conns.is_empty() {
            self.finish();
        }
    }

    fn reply_error(&self, conn: ConnId, code: ErrorCode, message: String) {
        if let Some((_, out)) = self.conns.get(&conn) {
            let _ = out.send(ServerMsg::error(code, message));
        }
    }

    /// Buffers `id` for the seat of `conn`, replacing anything sent earlier
    /// in the same tick.
    pub fn submit(&mut self, conn: ConnId, id: u16) -> Result<(), ErrorCode> {
        let result = match self.conns.get(&conn) {
            None => Err(ErrorCode::NotJoined),
            Some(_) if self.phase == Phase::Finished => Err(ErrorCode::Finished),
            Some(_) if id as usize >= self.space.len() => Err(ErrorCode::UnknownAction),
            Some(&(seat, _)) => {
                self.pending[seat] = Some(ActionId(id));
                Ok(())
            }
        };
        if let Err(code) = result {
            self.reply_error(conn, code, format!("action {id} rejected"));
        }
        result
    }

    pub fn start(&mut self, conn: ConnId) -> Result<(), ErrorCode> {
        let result = if !self.conns.contains_key(&conn) {
            Err(ErrorCode::NotJoined)
        } else if self.phase != Phase::Lobby {
            Err(ErrorCode::NotInLobby)
        } else {
            self.phase = Phase::Running;
            Ok(())
        };
        if let Err(code) = result {
            self.reply_error(conn, code, "cannot start".into());
        }
        result
    }

    /// Advances one step. Human seats without input play NOOP.
    pub fn tick(&mut self) -> coopcraft::Result<()> {
        if self.phase != Phase::Running {
            return Ok(());
        }
        let state = self.env.state();
        let mut actions = Vec::with_capacity(self.seats.len());
        for (i, c) in self.seats.iter().enumerate() {
            actions.push(match c {
                Controller::Human(_) => self.pending[i].take().unwrap_or(ActionId(0)),
                Controller::Bot => self.bots[i].act(state, i, &self.space),
            });
        }
        let t = self.env.step_raw(&actions)?;
        self.tally.record(&t);
        if let Some(w) = self.writer.as_mut() {
            w.step(&StepRecord {
                step: self.log.len() as u64,
                actions: actions.clone(),
                rewards: t.rewards.clone(),
                done: t.done,
                events: t.info.events.clone(),
            })?;
        }
        self.log.push(actions);
        let step = self.env.state().time;
        for (seat, out) in self.conns.values() {
            let _ = out.send(ServerMsg::State {
                step,
                view: Box::new(build(&self.env, *seat, Some(&t))),
            });
        }
        if t.done {
            self.finish();
        }
        Ok(())
    }

    pub fn summary(&self) -> Summary {
        Summary::new(&self.env, &self.tally)
    }

    fn finish(&mut self) {
        self.phase = Phase::Finished;
        if let Some(w) = self.writer.take() {
            let _ = w.finish(&Footer::of(&self.env));
        }
        let summary = self.summary();
        for (_, out) in self.conns.values() {
            let _ = out.send(ServerMsg::Done {
                summary: summary.clone(),
            });
        }
    }
}

pub fn manifests(env: &Env, tick_hz: f32) -> Manifests {
    Manifests {
        engine_version: ENGINE_VERSION.to_string(),
        config: env.config().clone(),
        obs_layout: env.layout().clone(),
        action_table: env.action_space().table(),
        tick_hz,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use tokio::sync::mpsc::unbounded_channel;

    #[test]
    fn seats_and_errors() {
        let mut s = Session::new("t", EnvConfig::coop(), 1, 5.0, None).unwrap();
        let (tx, mut rx) = unbounded_channel();
        assert_eq!(s.join(1, Some(2), tx.clone()), Ok(2));
        assert!(matches!(rx.try_recv().unwrap(), ServerMsg::Hello { seat: 2, .. }));
        assert!(matches!(rx.try_recv().unwrap(), ServerMsg::State { step: 0, .. }));
        assert_eq!(s.join(2, Some(2), tx.clone()), Err(ErrorCode::SeatTaken));
        assert_eq!(s.join(2, Some(3), tx.clone()), Err(ErrorCode::BadSeat));
        assert_eq!(s.join(1, None, tx.clone()), Err(ErrorCode::AlreadyJoined));
        assert_eq!(s.join(2, None, tx.clone()), Ok(0));
        assert_eq!(s.join(3, None, tx.clone()), Ok(1));
        assert_eq!(s.join(4, None, tx.clone()), Err(ErrorCode::SessionFull));
        assert_eq!(s.submit(9, 0), Err(ErrorCode::NotJoined));
        assert_eq!(s.submit(1, 999), Err(ErrorCode::UnknownAction));
        s.leave(3);
        assert_eq!(s.seats()[1], Controller::Bot);
        assert_eq!(s.info().seats, ["human", "bot", "human"]);
    }

    #[test]
    fn lobby_does_not_tick() {
        let mut s = Session::new("t", EnvConfig::coop(), 1, 5.0, None).unwrap();
        let (tx, _rx) = unbounded_channel();
        s.join(1, None, tx).unwrap();
        s.tick().unwrap();
        assert_eq!(s.env().state().time, 0);
        s.start(1).unwrap();
        assert_eq!(s.start(1), Err(ErrorCode::NotInLobby));
        s.tick().unwrap();
        assert_eq!(s.env().state().time, 1);
    }

    #[test]
    fn last_write_wins_then_noop() {
        let mut s = Session::new("t", EnvConfig::coop(), 4, 5.0, None).unwrap();
        let (tx, _rx) = unbounded_channel();
        s.join(1, Some(0), tx).unwrap();
        s.start(1).unwrap();
        s.submit(1, 3).unwrap();
        s.submit(1, 4).unwrap();
        s.tick().unwrap();
        s.tick().unwrap();
        assert_eq!(s.log()[0][0], ActionId(4));
        assert_eq!(s.log()[1][0], ActionId(0));
    }

    #[test]
    fn last_human_leaving_ends_the_episode() {
        let mut s = Session::new("t", EnvConfig::coop(), 4, 5.0, None).unwrap();
        let (tx, _rx) = unbounded_channel();
        s.join(1, None, tx).unwrap();
        s.start(1).unwrap();
        s.tick().unwrap();
        s.leave(1);
        assert_eq!(s.phase(), Phase::Finished);
    }
}
