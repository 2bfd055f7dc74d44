//! JSON-lines episode recordings and deterministic re-simulation.
//!
//! A replay is one header line, one line per step and a footer line.
//! Replaying re-runs the engine from the header's config and seed with the
//! recorded actions and compares every step against the log.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::agent::ActionId;
use crate::config::EnvConfig;
use crate::env::Env;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::obs::ObsLayout;
use crate::policy::TeamPolicy;
use crate::ENGINE_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub engine_version: String,
    pub config: EnvConfig,
    pub seed: u64,
    pub policy: String,
    pub action_table: Vec<(u16, String)>,
    pub obs_layout: ObsLayout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    pub actions: Vec<ActionId>,
    pub rewards: Vec<f32>,
    pub done: bool,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Footer {
    pub total_steps: u64,
    pub achievements: Vec<Vec<String>>,
    /// Hex digest of the final world state.
    pub state_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
enum Line {
    Header(Header),
    Step(StepRecord),
    Footer(Footer),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub header: Header,
    pub steps: Vec<StepRecord>,
    pub footer: Footer,
}

impl Header {
    pub fn new(cfg: &EnvConfig, seed: u64, policy: &str) -> Self {
        let env_space = crate::agent::ActionSpace::new(cfg.variant, cfg.n_agents);
        Self {
            engine_version: ENGINE_VERSION.to_string(),
            config: cfg.clone(),
            seed,
            policy: policy.to_string(),
            action_table: env_space.table(),
            obs_layout: ObsLayout::new(cfg),
        }
    }
}

impl Footer {
    /// Footer describing `env` as it stands.
    pub fn of(env: &Env) -> Footer {
        let s = env.state();
        Footer {
            total_steps: s.time,
            achievements: s
                .ledger
                .summary()
                .into_iter()
                .map(|v| v.into_iter().map(String::from).collect())
                .collect(),
            state_hash: format!("{:016x}", s.state_hash()),
        }
    }
}

/// Streams a replay to `W`, one JSON object per line.
pub struct ReplayWriter<W: Write> {
    out: W,
}

impl<W: Write> ReplayWriter<W> {
    pub fn new(mut out: W, header: &Header) -> Result<Self> {
        write_line(&mut out, &Line::Header(header.clone()))?;
        Ok(Self { out })
    }

    pub fn step(&mut self, rec: &StepRecord) -> Result<()> {
        write_line(&mut self.out, &Line::Step(rec.clone()))
    }

    pub fn finish(mut self, footer: &Footer) -> Result<W> {
        write_line(&mut self.out, &Line::Footer(footer.clone()))?;
        self.out.flush()?;
        Ok(self.out)
    }
}

fn write_line<W: Write>(out: &mut W, line: &Line) -> Result<()> {
    serde_json::to_writer(&mut *out, line).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Outcome of a recorded rollout.
#[derive(Debug, Clone, PartialEq)]
pub struct RolloutSummary {
    pub steps: u64,
    pub returns: Vec<f32>,
    pub achievements: usize,
    pub trades: usize,
    pub deaths: usize,
    pub revives: usize,
    /// Largest team return reachable under the config's weights.
    pub max_total: f32,
    /// Unlocked achievement weight as a percentage of the maximum.
    pub score_percent: f32,
    pub state_hash: u64,
}

impl RolloutSummary {
    pub fn team_return(&self) -> f32 {
        self.returns.iter().sum()
    }

    pub fn percent_of_max(&self) -> f32 {
        if self.max_total > 0.0 {
            100.0 * self.team_return() / self.max_total
        } else {
            0.0
        }
    }
}

/// Runs one episode of `policy` (at most `max_steps` steps), optionally
/// recording it to `out`.
pub fn rollout<W: Write>(
    cfg: &EnvConfig,
    seed: u64,
    policy: &str,
    max_steps: Option<u64>,
    out: Option<W>,
) -> Result<RolloutSummary> {
    let mut env = Env::new(cfg.clone(), seed)?;
    let mut team = TeamPolicy::parse(policy, cfg.n_agents, seed)?;
    let space = env.action_space();
    let mut writer = out
        .map(|w| ReplayWriter::new(w, &Header::new(cfg, seed, policy)))
        .transpose()?;
    let mut returns = vec![0.0f32; cfg.n_agents];
    let (mut trades, mut deaths, mut revives) = (0, 0, 0);
    let limit = max_steps.unwrap_or(u64::MAX);
    let mut steps = 0;
    while steps < limit {
        let actions = team.actions(env.state(), &space);
        let t = env.step_raw(&actions)?;
        for (r, x) in returns.iter_mut().zip(&t.rewards) {
            *r += x;
        }
        for e in &t.info.events {
            match e {
                Event::Trade { .. } => trades += 1,
                Event::AgentDied { .. } => deaths += 1,
                Event::Revive { .. } => revives += 1,
                _ => {}
            }
        }
        if let Some(w) = writer.as_mut() {
            w.step(&StepRecord {
                step: steps,
                actions,
                rewards: t.rewards,
                done: t.done,
                events: t.info.events,
            })?;
        }
        steps += 1;
        if t.done {
            break;
        }
    }
    if let Some(w) = writer {
        w.finish(&Footer::of(&env))?;
    }
    Ok(RolloutSummary {
        steps,
        returns,
        achievements: env.state().ledger.total(),
        trades,
        deaths,
        revives,
        max_total: env.max_total(),
        score_percent: env.score_percent(),
        state_hash: env.state().state_hash(),
    })
}

impl Replay {
    /// Parses a replay, rejecting other engine versions.
    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        let mut header = None;
        let mut steps = Vec::new();
        let mut footer = None;
        for (n, line) in input.lines().enumerate() {
            let n = n + 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let corrupt = |message: String| Error::CorruptReplay { line: n, message };
            if footer.is_some() {
                return Err(corrupt("content after footer".into()));
            }
            let parsed: Line = serde_json::from_str(&line).map_err(|e| corrupt(e.to_string()))?;
            match (parsed, header.is_some()) {
                (Line::Header(h), false) => {
                    if h.engine_version != ENGINE_VERSION {
                        return Err(Error::VersionMismatch {
                            expected: ENGINE_VERSION.to_string(),
                            found: h.engine_version,
                        });
                    }
                    header = Some(h);
                }
                (Line::Header(_), true) => return Err(corrupt("duplicate header".into())),
                (_, false) => return Err(corrupt("missing header".into())),
                (Line::Step(s), true) => {
                    if s.step != steps.len() as u64 {
                        return Err(corrupt(format!("expected step {}, found {}", steps.len(), s.step)));
                    }
                    steps.push(s);
                }
                (Line::Footer(f), true) => footer = Some(f),
            }
        }
        let header = header.ok_or(Error::CorruptReplay {
            line: 0,
            message: "empty replay".into(),
        })?;
        let footer = footer.ok_or(Error::CorruptReplay {
            line: 0,
            message: "missing footer".into(),
        })?;
        Ok(Self { header, steps, footer })
    }

    /// Re-simulates and reports the first divergence, if any.
    pub fn verify(&self) -> Result<Verification> {
        let mut env = Env::new(self.header.config.clone(), self.header.seed)?;
        for rec in &self.steps {
            let t = env.step_raw(&rec.actions)?;
            let field = if t.rewards != rec.rewards {
                Some(("rewards", format!("{:?}", rec.rewards), format!("{:?}", t.rewards)))
            } else if t.done != rec.done {
                Some(("done", rec.done.to_string(), t.done.to_string()))
            } else if t.info.events != rec.events {
                Some(("events", format!("{:?}", rec.events), format!("{:?}", t.info.events)))
            } else {
                None
            };
            if let Some((field, expected, found)) = field {
                return Ok(Verification {
                    steps: rec.step,
                    divergence: Some(Divergence {
                        step: Some(rec.step),
                        field: field.into(),
                        expected,
                        found,
                    }),
                });
            }
        }
        let end = Footer::of(&env);
        let n = self.steps.len() as u64;
        let divergence = if end.total_steps != self.footer.total_steps {
            Some((
                "total_steps",
                self.footer.total_steps.to_string(),
                end.total_steps.to_string(),
            ))
        } else if end.achievements != self.footer.achievements {
            Some((
                "achievements",
                format!("{:?}", self.footer.achievements),
                format!("{:?}", end.achievements),
            ))
        } else if end.state_hash != self.footer.state_hash {
            Some(("state_hash", self.footer.state_hash.clone(), end.state_hash))
        } else {
            None
        }
        .map(|(field, expected, found)| Divergence {
            step: None,
            field: field.into(),
            expected,
            found,
        });
        Ok(Verification { steps: n, divergence })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// `None` for a footer mismatch.
    pub step: Option<u64>,
    pub field: String,
    pub expected: String,
    pub found: String,
}

impl std::fmt::Display for Divergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.step {
            Some(s) => write!(
                f,
                "step {s}: {} differs (recorded {}, replayed {})",
                self.field, self.expected, self.found
            ),
            None => write!(
                f,
                "footer: {} differs (recorded {}, replayed {})",
                self.field, self.expected, self.found
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub steps: u64,
    pub divergence: Option<Divergence>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.divergence.is_none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(steps: u64) -> Vec<u8> {
        let mut buf = Vec::new();
        rollout(&EnvConfig::coop(), 11, "scripted:trio", Some(steps), Some(&mut buf)).unwrap();
        buf
    }

    #[test]
    fn roundtrip_verifies() {
        let buf = record(60);
        let r = Replay::read(&buf[..]).unwrap();
        assert_eq!(r.steps.len(), 60);
        assert_eq!(r.header.action_table.len(), 65);
        assert!(r.verify().unwrap().ok());
    }

    #[test]
    fn tampered_action_is_located() {
        let buf = record(40);
        let mut r = Replay::read(&buf[..]).unwrap();
        // Stepping into a different action changes state; the first visible
        // effect may come later, but never earlier.
        r.steps[10].actions[0] = ActionId(6);
        let v = r.verify().unwrap();
        let d = v.divergence.unwrap();
        assert!(d.step.is_none_or(|s| s >= 10), "{d}");
    }

    #[test]
    fn tampered_reward_reports_step_and_field() {
        let buf = record(30);
        let mut r = Replay::read(&buf[..]).unwrap();
        r.steps[7].rewards[1] += 1.0;
        let d = r.verify().unwrap().divergence.unwrap();
        assert_eq!(d.step, Some(7));
        assert_eq!(d.field, "rewards");
    }

    #[test]
    fn version_and_corruption_errors() {
        let buf = String::from_utf8(record(5)).unwrap();
        let bumped = buf.replacen(ENGINE_VERSION, "0.0.0-other", 1);
        assert!(matches!(
            Replay::read(bumped.as_bytes()),
            Err(Error::VersionMismatch { .. })
        ));
        let mut lines: Vec<&str> = buf.lines().collect();
        lines[2] = "{not json";
        let broken = lines.join("\n");
        assert!(matches!(
            Replay::read(broken.as_bytes()),
            Err(Error::CorruptReplay { line: 3, .. })
        ));
        let truncated: String = buf.lines().take(3).collect::<Vec<_>>().join("\n");
        assert!(matches!(
            Replay::read(truncated.as_bytes()),
            Err(Error::CorruptReplay { .. })
        ));
    }
}
