//! Deterministic multi-agent survival-crafting environment.
//!
//! Agents share a procedurally generated nine-floor world, gather and craft,
//! fight mobs, and in the cooperative variant split into Miner, Forager and
//! Warrior specializations that must trade resources to progress.
//!
//! ```
//! use coopcraft::{ActionId, Env, EnvConfig};
//!
//! let mut env = Env::new(EnvConfig::coop(), 42).unwrap();
//! let step = env.step(&[ActionId(0); 3]).unwrap();
//! assert_eq!(step.rewards.len(), 3);
//! ```

pub mod agent;
pub mod batch;
pub mod config;
pub mod coop;
pub mod env;
pub mod error;
pub mod event;
pub mod obs;
pub mod policy;
pub mod replay;
pub mod rng;
pub mod scoring;
pub mod world;

pub use agent::{Action, ActionId, ActionSpace, AgentState, Item, Specialization};
pub use batch::{episode_seed, BatchEnv, BatchStep};
pub use config::{EnvConfig, RewardMode, Variant, WorldGenConfig};
pub use coop::{TradableResource, TradeRequest};
pub use env::{initial_state, reset, step_state, Env, Info, StepResult, Transition};
pub use error::{Error, Result};
pub use event::{Actor, Event};
pub use obs::{encode_observation, ObsLayout};
pub use policy::{Policy, RandomPolicy, Role, ScriptedBot, TeamPolicy};
pub use replay::{rollout, Footer, Header, Replay, ReplayWriter, RolloutSummary, StepRecord, Verification};
pub use rng::RngState;
pub use scoring::{max_total, Achievement, AchievementLedger, WeightTable};
pub use world::{MobKind, Pos, TileKind, WorldState};

/// Version string stamped into replay headers.
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
