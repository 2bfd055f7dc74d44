//! Environment facade: reset, step, action table and observation encoding.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::agent::{check_termination, resolve_actions, survival_tick, Action, ActionId, ActionSpace, Specialization};
use crate::config::{EnvConfig, Variant};
use crate::coop::tick_requests;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::obs::{encode_observation_into, ObsLayout};
use crate::rng::tags;
use crate::scoring::{self, compute_rewards, record_achievements, Achievement, Meters, RewardBreakdown};
use crate::world::{generate_world, step_world, WorldState};

/// Builds the initial world for `seed`, including specialization assignment.
pub fn initial_state(seed: u64, cfg: &EnvConfig) -> Result<WorldState> {
    cfg.validate()?;
    let mut state = generate_world(seed, &cfg.worldgen, &cfg.survival, cfg.n_agents)?;
    if cfg.variant == Variant::Coop {
        for (a, spec) in state.agents.iter_mut().zip(Specialization::COOP_ORDER) {
            *a = crate::agent::AgentState::spawn(a.id, spec, a.pos, &cfg.survival);
        }
    }
    Ok(state)
}

/// Per-step side information.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Info {
    pub events: Vec<Event>,
    /// First-time completions this step, as (agent, achievement).
    pub achievements: Vec<(u8, Achievement)>,
    pub reward_terms: RewardBreakdown,
    pub alive: Vec<bool>,
    pub floors: Vec<u8>,
    /// Observations of the episode that just ended (batch auto-reset only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub final_observation: Option<Vec<f32>>,
}

impl Info {
    pub fn trades(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| matches!(e, Event::Trade { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepResult {
    /// `n_agents` observations back to back, each `layout.total` long.
    pub observations: Vec<f32>,
    pub rewards: Vec<f32>,
    pub done: bool,
    pub truncated: bool,
    pub info: Info,
}

/// What one step did to the state, before observation encoding.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transition {
    pub rewards: Vec<f32>,
    pub done: bool,
    pub truncated: bool,
    pub info: Info,
}

/// One environment timestep over `state`. Dead and sleeping agents act as
/// NOOP. Stepping a finished episode returns `done` with zero rewards.
pub fn step_state(
    state: &mut WorldState,
    cfg: &EnvConfig,
    space: &ActionSpace,
    actions: &[ActionId],
) -> Result<Transition> {
    let n = state.n_agents();
    if actions.len() != n {
        return Err(Error::ActionCountMismatch {
            expected: n,
            got: actions.len(),
        });
    }
    let pre = check_termination(state, cfg.max_episode_steps);
    if pre.done {
        return Ok(Transition {
            rewards: vec![0.0; n],
            done: true,
            truncated: pre.truncated,
            info: Info {
                reward_terms: RewardBreakdown {
                    achievement: vec![0.0; n],
                    shaping: vec![0.0; n],
                    penalty: vec![0.0; n],
                },
                alive: state.agents.iter().map(|a| a.alive).collect(),
                floors: state.agents.iter().map(|a| a.floor).collect(),
                ..Info::default()
            },
        });
    }

    let mut decoded = Vec::with_capacity(n);
    for (a, &id) in state.agents.iter().zip(actions) {
        let act = space.decode(id)?;
        decoded.push(if !a.alive || a.sleeping { Action::Noop } else { act });
    }
    let before: Vec<Meters> = state.agents.iter().map(Meters::of).collect();

    let step_rng = state.rng.split(tags::STEP ^ (state.time << 8));
    let mut act_rng = step_rng.split(tags::ACTIONS);
    let mut world_rng = step_rng.split(tags::WORLD);
    let mut events = Vec::new();

    resolve_actions(state, &decoded, cfg, &mut act_rng, &mut events);
    step_world(state, &cfg.worldgen, &cfg.survival, &mut world_rng, &mut events);
    survival_tick(state, &cfg.survival, &cfg.worldgen, &mut events);
    tick_requests(state);
    let unlocks = record_achievements(&mut state.ledger, &state.agents, cfg.variant, &events);
    let terms = compute_rewards(&cfg.reward, &unlocks, &before, &state.agents);
    let term = check_termination(state, cfg.max_episode_steps);

    Ok(Transition {
        rewards: terms.total(),
        done: term.done,
        truncated: term.truncated,
        info: Info {
            events,
            achievements: unlocks,
            reward_terms: terms,
            alive: state.agents.iter().map(|a| a.alive).collect(),
            floors: state.agents.iter().map(|a| a.floor).collect(),
            final_observation: None,
        },
    })
}

/// A single environment instance.
#[derive(Debug, Clone)]
pub struct Env {
    cfg: Arc<EnvConfig>,
    space: ActionSpace,
    layout: Arc<ObsLayout>,
    state: WorldState,
    seed: u64,
}

impl Env {
    /// Validates `cfg` and resets to `seed`.
    pub fn new(cfg: EnvConfig, seed: u64) -> Result<Self> {
        let layout = Arc::new(ObsLayout::new(&cfg));
        Self::with_shared(Arc::new(cfg), layout, seed)
    }

    pub(crate) fn with_shared(cfg: Arc<EnvConfig>, layout: Arc<ObsLayout>, seed: u64) -> Result<Self> {
        let state = initial_state(seed, &cfg)?;
        Ok(Self {
            space: ActionSpace::new(cfg.variant, cfg.n_agents),
            cfg,
            layout,
            state,
            seed,
        })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &ObsLayout {
        &self.layout
    }

    pub fn action_space(&self) -> ActionSpace {
        self.space
    }

    pub fn state(&self) -> &WorldState {
        &self.state
    }

    /// Mutable access for scenario setup and tests.
    pub fn state_mut(&mut self) -> &mut WorldState {
        &mut self.state
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_agents(&self) -> usize {
        self.state.n_agents()
    }

    pub fn obs_len(&self) -> usize {
        self.layout.total
    }

    /// Team achievement maximum for this config and the current roster.
    pub fn max_total(&self) -> f32 {
        let specs: Vec<_> = self.state.agents.iter().map(|a| a.specialization).collect();
        scoring::max_total(&self.cfg.reward.weights, self.cfg.variant, &specs)
    }

    pub fn score_percent(&self) -> f32 {
        scoring::score_percent(&self.cfg, &self.state.ledger, &self.state.agents)
    }

    /// Starts a new episode and returns the stacked initial observations.
    pub fn reset(&mut self, seed: u64) -> Result<Vec<f32>> {
        self.state = initial_state(seed, &self.cfg)?;
        self.seed = seed;
        Ok(self.observe())
    }

    pub fn observe(&self) -> Vec<f32> {
        let mut out = vec![0.0; self.n_agents() * self.obs_len()];
        self.observe_into(&mut out);
        out
    }

    pub fn observe_into(&self, out: &mut [f32]) {
        let len = self.obs_len();
        for (i, chunk) in out.chunks_exact_mut(len).enumerate() {
            encode_observation_into(&self.state, i, &self.layout, &self.cfg, chunk);
        }
    }

    pub fn observation(&self, agent: usize) -> Vec<f32> {
        let mut v = vec![0.0; self.obs_len()];
        encode_observation_into(&self.state, agent, &self.layout, &self.cfg, &mut v);
        v
    }

    /// Advances without encoding observations.
    pub fn step_raw(&mut self, actions: &[ActionId]) -> Result<Transition> {
        step_state(&mut self.state, &self.cfg, &self.space, actions)
    }

    pub fn step(&mut self, actions: &[ActionId]) -> Result<StepResult> {
        let t = self.step_raw(actions)?;
        Ok(StepResult {
            observations: self.observe(),
            rewards: t.rewards,
            done: t.done,
            truncated: t.truncated,
            info: t.info,
        })
    }

    /// Convenience for decoded actions.
    pub fn step_actions(&mut self, actions: &[Action]) -> Result<StepResult> {
        let ids = actions
            .iter()
            .map(|&a| self.space.encode(a))
            .collect::<Result<Vec<_>>>()?;
        self.step(&ids)
    }
}

/// Functional form of [`Env::reset`]: initial observations plus state.
pub fn reset(seed: u64, cfg: &EnvConfig) -> Result<(Vec<Vec<f32>>, WorldState)> {
    let env = Env::new(cfg.clone(), seed)?;
    let obs = (0..env.n_agents()).map(|i| env.observation(i)).collect();
    Ok((obs, env.state))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::Item;
    use crate::coop::TradableResource;

    #[test]
    fn coop_reset_assigns_specializations() {
        let env = Env::new(EnvConfig::coop(), 42).unwrap();
        let specs: Vec<_> = env.state().agents.iter().map(|a| a.specialization).collect();
        assert_eq!(specs, Specialization::COOP_ORDER.to_vec());
        let obs = env.observation(0);
        let r = env.layout().range("specialization").unwrap();
        assert_eq!(&obs[r], &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn reset_is_deterministic() {
        let (a, _) = reset(42, &EnvConfig::coop()).unwrap();
        let (b, _) = reset(42, &EnvConfig::coop()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ma_observation_lengths() {
        let (obs, _) = reset(1, &EnvConfig::ma(4)).unwrap();
        let l = ObsLayout::new(&EnvConfig::ma(4));
        assert_eq!(obs.len(), 4);
        assert!(obs.iter().all(|o| o.len() == l.total));
    }

    #[test]
    fn wrong_action_count_rejected() {
        let mut env = Env::new(EnvConfig::coop(), 1).unwrap();
        let err = env.step(&[ActionId(0)]).unwrap_err();
        assert!(matches!(err, Error::ActionCountMismatch { expected: 3, got: 1 }));
    }

    #[test]
    fn all_dead_is_done_with_zero_reward() {
        let mut env = Env::new(EnvConfig::coop(), 1).unwrap();
        for a in env.state_mut().agents.iter_mut() {
            a.alive = false;
            a.health = 0;
        }
        let r = env.step(&[ActionId(0); 3]).unwrap();
        assert!(r.done && !r.truncated);
        assert_eq!(r.rewards, vec![0.0; 3]);
    }

    #[test]
    fn truncation_at_step_cap() {
        let cfg = EnvConfig {
            max_episode_steps: 5,
            ..EnvConfig::coop()
        };
        let mut env = Env::new(cfg, 1).unwrap();
        for t in 0..5 {
            let r = env.step(&[ActionId(0); 3]).unwrap();
            assert_eq!(r.done, t == 4);
            assert_eq!(r.truncated, t == 4);
        }
    }

    #[test]
    fn request_then_give_moves_one_unit() {
        let mut env = Env::new(EnvConfig::coop(), 3).unwrap();
        env.state_mut().agents[0].inventory.add(Item::Stone, 2);
        let space = env.action_space();
        let req = space.encode(Action::Request(TradableResource::Stone)).unwrap();
        env.step(&[ActionId(0), req, ActionId(0)]).unwrap();
        let give = space.encode(Action::Give(1)).unwrap();
        let r = env.step(&[give, ActionId(0), ActionId(0)]).unwrap();
        assert_eq!(
            r.info.trades().collect::<Vec<_>>(),
            vec![&Event::Trade {
                giver: 0,
                receiver: 1,
                resource: TradableResource::Stone
            }]
        );
        assert_eq!(env.state().agents[0].inventory.get(Item::Stone), 1);
        assert_eq!(env.state().agents[1].inventory.get(Item::Stone), 1);
    }
}
