//! Vectorized stepping of many independent environments with auto-reset.

use std::sync::Arc;

use rayon::prelude::*;

use crate::agent::ActionId;
use crate::config::EnvConfig;
use crate::env::{Env, Info};
use crate::error::{Error, Result};
use crate::obs::ObsLayout;
use crate::rng::{tags, RngState};

/// Seed of the `episode`-th episode (0-based) run by a slot seeded `base`.
/// Episode 0 uses `base` unchanged.
pub fn episode_seed(base: u64, episode: u64) -> u64 {
    if episode == 0 {
        base
    } else {
        RngState::new(base).split(tags::EPISODE).split(episode).next_u64()
    }
}

#[derive(Debug, Clone)]
struct Slot {
    env: Env,
    base_seed: u64,
    episode: u64,
    rewards: Vec<f32>,
    done: bool,
    truncated: bool,
    info: Info,
}

/// Borrowed view of the latest batched step.
#[derive(Debug)]
pub struct BatchStep<'a> {
    /// `n_envs * n_agents * obs_len`, env-major then agent-major.
    pub observations: &'a [f32],
    /// `n_envs * n_agents`.
    pub rewards: &'a [f32],
    pub dones: &'a [bool],
    pub truncated: &'a [bool],
    infos: Vec<&'a Info>,
}

impl<'a> BatchStep<'a> {
    pub fn info(&self, env: usize) -> &'a Info {
        self.infos[env]
    }
}

pub struct BatchEnv {
    slots: Vec<Slot>,
    obs: Vec<f32>,
    rewards: Vec<f32>,
    dones: Vec<bool>,
    truncated: Vec<bool>,
    pool: Option<rayon::ThreadPool>,
    layout: Arc<ObsLayout>,
    n_agents: usize,
}

impl BatchEnv {
    /// One environment per seed. `threads` <= 1 steps sequentially on the
    /// calling thread; otherwise a dedicated pool of that size is used.
    pub fn new(cfg: EnvConfig, seeds: &[u64], threads: usize) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::InvalidConfig("batch needs at least one environment".into()));
        }
        let layout = Arc::new(ObsLayout::new(&cfg));
        let cfg = Arc::new(cfg);
        let n_agents = cfg.n_agents;
        let slots = seeds
            .iter()
            .map(|&s| {
                Ok(Slot {
                    env: Env::with_shared(cfg.clone(), layout.clone(), s)?,
                    base_seed: s,
                    episode: 0,
                    rewards: vec![0.0; n_agents],
                    done: false,
                    truncated: false,
                    info: Info::default(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let pool = if threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?,
            )
        } else {
            None
        };
        let n = slots.len();
        let mut b = Self {
            obs: vec![0.0; n * n_agents * layout.total],
            rewards: vec![0.0; n * n_agents],
            dones: vec![false; n],
            truncated: vec![false; n],
            slots,
            pool,
            layout,
            n_agents,
        };
        b.encode_all();
        Ok(b)
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn layout(&self) -> &ObsLayout {
        &self.layout
    }

    pub fn env(&self, i: usize) -> &Env {
        &self.slots[i].env
    }

    pub fn observations(&self) -> &[f32] {
        &self.obs
    }

    /// Episodes completed so far by slot `i`.
    pub fn episodes(&self, i: usize) -> u64 {
        self.slots[i].episode
    }

    /// Resets every slot with a fresh list of seeds.
    pub fn reset(&mut self, seeds: &[u64]) -> Result<&[f32]> {
        if seeds.len() != self.slots.len() {
            return Err(Error::ShapeMismatch {
                expected: self.slots.len(),
                got: seeds.len(),
            });
        }
        for (slot, &s) in self.slots.iter_mut().zip(seeds) {
            slot.env.reset(s)?;
            slot.base_seed = s;
            slot.episode = 0;
        }
        self.encode_all();
        Ok(&self.obs)
    }

    fn encode_all(&mut self) {
        let per_env = self.n_agents * self.layout.total;
        for (slot, chunk) in self.slots.iter().zip(self.obs.chunks_exact_mut(per_env)) {
            slot.env.observe_into(chunk);
        }
    }

    /// Steps every environment. `actions` is `n_envs * n_agents`, env-major.
    pub fn step(&mut self, actions: &[ActionId]) -> Result<BatchStep<'_>> {
        let n = self.n_agents;
        let expected = self.slots.len() * n;
        if actions.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                got: actions.len(),
            });
        }
        let per_env = n * self.layout.total;
        let work = |(slot, (obs, acts)): (&mut Slot, (&mut [f32], &[ActionId]))| step_slot(slot, obs, acts);
        let slots = &mut self.slots;
        let obs = &mut self.obs;
        match &self.pool {
            Some(pool) => pool.install(|| {
                slots
                    .par_iter_mut()
                    .zip(obs.par_chunks_exact_mut(per_env).zip(actions.par_chunks_exact(n)))
                    .try_for_each(work)
            })?,
            None => slots
                .iter_mut()
                .zip(obs.chunks_exact_mut(per_env).zip(actions.chunks_exact(n)))
                .try_for_each(work)?,
        }
        for (i, slot) in self.slots.iter().enumerate() {
            self.rewards[i * n..(i + 1) * n].copy_from_slice(&slot.rewards);
            self.dones[i] = slot.done;
            self.truncated[i] = slot.truncated;
        }
        Ok(BatchStep {
            observations: &self.obs,
            rewards: &self.rewards,
            dones: &self.dones,
            truncated: &self.truncated,
            infos: self.slots.iter().map(|s| &s.info).collect(),
        })
    }
}

fn step_slot(slot: &mut Slot, obs: &mut [f32], actions: &[ActionId]) -> Result<()> {
    let t = slot.env.step_raw(actions)?;
    slot.rewards.copy_from_slice(&t.rewards);
    slot.done = t.done;
    slot.truncated = t.truncated;
    slot.info = t.info;
    slot.env.observe_into(obs);
    if t.done {
        slot.info.final_observation = Some(obs.to_vec());
        slot.episode += 1;
        slot.env.reset(episode_seed(slot.base_seed, slot.episode))?;
        slot.env.observe_into(obs);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn episode_zero_keeps_base_seed() {
        assert_eq!(episode_seed(99, 0), 99);
        assert_ne!(episode_seed(99, 1), 99);
        assert_ne!(episode_seed(99, 1), episode_seed(99, 2));
        assert_eq!(episode_seed(99, 3), episode_seed(99, 3));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let mut b = BatchEnv::new(EnvConfig::coop(), &[1, 2], 1).unwrap();
        assert!(matches!(
            b.step(&[ActionId(0); 5]),
            Err(Error::ShapeMismatch { expected: 6, got: 5 })
        ));
    }

    #[test]
    fn auto_reset_after_done() {
        let cfg = EnvConfig {
            max_episode_steps: 3,
            ..EnvConfig::coop()
        };
        let mut b = BatchEnv::new(cfg.clone(), &[5], 1).unwrap();
        for _ in 0..2 {
            assert!(!b.step(&[ActionId(0); 3]).unwrap().dones[0]);
        }
        let s = b.step(&[ActionId(0); 3]).unwrap();
        assert!(s.dones[0] && s.truncated[0]);
        let fin = s.info(0).final_observation.clone().unwrap();
        let fresh = Env::new(cfg, episode_seed(5, 1)).unwrap().observe();
        assert_eq!(b.observations(), &fresh[..]);
        assert_ne!(fin, fresh);
        assert_eq!(b.env(0).state().time, 0);
    }
}
