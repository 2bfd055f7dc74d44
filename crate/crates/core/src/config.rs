//! Environment configuration and the plain-text `key=value` loader.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scoring::{Achievement, WeightTable};
use crate::world::MobKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Homogeneous agents, base action table.
    #[serde(rename = "ma")]
    Ma,
    /// Three specialized agents with trading.
    #[serde(rename = "coop")]
    Coop,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Ma => "ma",
            Variant::Coop => "coop",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ma" => Ok(Variant::Ma),
            "coop" => Ok(Variant::Coop),
            other => Err(Error::InvalidConfig(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RewardMode {
    #[serde(rename = "shared")]
    Shared,
    #[serde(rename = "individual")]
    Individual,
}

/// Per-kind probabilities used by world generation. Tree and sapling rates
/// are relative to grass cells; ore rates relative to stone cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OreDensity {
    pub tree: f32,
    pub coal: f32,
    pub iron: f32,
    pub diamond: f32,
    pub sapphire: f32,
    pub ruby: f32,
    pub water_pool: f32,
    pub fountain: f32,
    pub lava: f32,
}

impl Default for OreDensity {
    fn default() -> Self {
        Self {
            tree: 0.18,
            coal: 0.07,
            iron: 0.035,
            diamond: 0.012,
            sapphire: 0.008,
            ruby: 0.008,
            water_pool: 0.03,
            fountain: 0.004,
            lava: 0.02,
        }
    }
}

impl OreDensity {
    fn fields(&self) -> [f32; 9] {
        [
            self.tree,
            self.coal,
            self.iron,
            self.diamond,
            self.sapphire,
            self.ruby,
            self.water_pool,
            self.fountain,
            self.lava,
        ]
    }
}

/// Per-floor population cap for each mob kind with a single agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MobCaps {
    pub cow: u16,
    pub bat: u16,
    pub zombie: u16,
    pub skeleton: u16,
}

impl Default for MobCaps {
    fn default() -> Self {
        Self {
            cow: 2,
            bat: 2,
            zombie: 4,
            skeleton: 3,
        }
    }
}

impl MobCaps {
    pub fn get(&self, kind: MobKind) -> u16 {
        match kind {
            MobKind::Cow => self.cow,
            MobKind::Bat => self.bat,
            MobKind::Zombie => self.zombie,
            MobKind::Skeleton => self.skeleton,
        }
    }

    pub fn set(&mut self, kind: MobKind, cap: u16) {
        match kind {
            MobKind::Cow => self.cow = cap,
            MobKind::Bat => self.bat = cap,
            MobKind::Zombie => self.zombie = cap,
            MobKind::Skeleton => self.skeleton = cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldGenConfig {
    pub floor_width: u16,
    pub floor_height: u16,
    pub n_floors: u8,
    pub ore_density: OreDensity,
    pub base_mob_cap: MobCaps,
    /// Overworld day/night period in timesteps.
    pub day_length: u32,
    /// Half-width of the square spawn region at the overworld centre.
    pub spawn_radius: u16,
    pub torch_radius: u8,
    pub zombie_damage: u8,
    pub skeleton_damage: u8,
    pub skeleton_range: u8,
    pub mob_cooldown: u8,
}

impl Default for WorldGenConfig {
    fn default() -> Self {
        Self {
            floor_width: 48,
            floor_height: 48,
            n_floors: 9,
            ore_density: OreDensity::default(),
            base_mob_cap: MobCaps::default(),
            day_length: 300,
            spawn_radius: 4,
            torch_radius: 4,
            zombie_damage: 2,
            skeleton_damage: 2,
            skeleton_range: 4,
            mob_cooldown: 4,
        }
    }
}

impl WorldGenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_floors < 1 {
            return Err(Error::InvalidConfig("n_floors must be >= 1".into()));
        }
        if self.n_floors as usize > crate::world::FLOOR_NAMES.len() {
            return Err(Error::InvalidConfig(format!(
                "n_floors must be <= {}",
                crate::world::FLOOR_NAMES.len()
            )));
        }
        if self.day_length == 0 {
            return Err(Error::InvalidConfig("day_length must be > 0".into()));
        }
        if self.floor_width < 16 || self.floor_height < 16 {
            return Err(Error::InvalidConfig("floors must be at least 16x16".into()));
        }
        if self.floor_width > 1024 || self.floor_height > 1024 {
            return Err(Error::InvalidConfig("floors must be at most 1024x1024".into()));
        }
        if self.ore_density.fields().iter().any(|d| !(0.0..=1.0).contains(d)) {
            return Err(Error::InvalidConfig("densities must lie in [0, 1]".into()));
        }
        let r = self.spawn_radius as u32;
        if 2 * r + 3 > self.floor_width.min(self.floor_height) as u32 {
            return Err(Error::InvalidConfig("spawn_radius does not fit the floor".into()));
        }
        Ok(())
    }
}

/// Survival and combat constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivalConfig {
    pub max_health: u8,
    pub max_energy: u8,
    pub meter_cap: u8,
    pub forager_meter_cap: u8,
    pub hunger_interval: u16,
    pub thirst_interval: u16,
    pub fatigue_interval: u16,
    pub sleep_interval: u16,
    pub regen_interval: u16,
    pub damage_interval: u16,
    pub base_damage: u8,
    pub warrior_damage: u8,
    pub plant_ripen_steps: u16,
}

impl Default for SurvivalConfig {
    fn default() -> Self {
        Self {
            max_health: 10,
            max_energy: 10,
            meter_cap: 9,
            forager_meter_cap: 12,
            hunger_interval: 25,
            thirst_interval: 20,
            fatigue_interval: 30,
            sleep_interval: 10,
            regen_interval: 10,
            damage_interval: 10,
            base_damage: 1,
            warrior_damage: 2,
            plant_ripen_steps: 120,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub mode: RewardMode,
    pub weights: WeightTable,
    pub food_water_shaping: bool,
    pub shaping_unit: f32,
    pub health_penalty_enabled: bool,
    pub health_penalty: f32,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            mode: RewardMode::Shared,
            weights: WeightTable::default(),
            food_water_shaping: false,
            shaping_unit: 0.1,
            health_penalty_enabled: false,
            health_penalty: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvConfig {
    pub variant: Variant,
    pub n_agents: usize,
    pub reward: RewardConfig,
    pub worldgen: WorldGenConfig,
    pub survival: SurvivalConfig,
    pub max_episode_steps: u64,
    /// Egocentric window as (height, width); both odd.
    pub obs_window: (u8, u8),
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self::coop()
    }
}

impl EnvConfig {
    pub fn coop() -> Self {
        Self {
            variant: Variant::Coop,
            n_agents: 3,
            reward: RewardConfig::default(),
            worldgen: WorldGenConfig::default(),
            survival: SurvivalConfig::default(),
            max_episode_steps: 10_000,
            obs_window: (9, 11),
        }
    }

    pub fn ma(n_agents: usize) -> Self {
        Self {
            variant: Variant::Ma,
            n_agents,
            ..Self::coop()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.worldgen.validate()?;
        if self.n_agents == 0 {
            return Err(Error::InvalidConfig("n_agents must be >= 1".into()));
        }
        if self.variant == Variant::Coop && self.n_agents != 3 {
            return Err(Error::InvalidConfig(
                "the coop variant requires exactly 3 agents".into(),
            ));
        }
        if self.n_agents > 255 {
            return Err(Error::InvalidConfig("n_agents must be <= 255".into()));
        }
        let (h, w) = self.obs_window;
        if h % 2 == 0 || w % 2 == 0 || h == 0 || w == 0 {
            return Err(Error::InvalidConfig("obs_window dimensions must be odd".into()));
        }
        if self.max_episode_steps == 0 {
            return Err(Error::InvalidConfig("max_episode_steps must be > 0".into()));
        }
        let s = &self.survival;
        if s.max_health == 0 || s.meter_cap == 0 || s.forager_meter_cap == 0 || s.max_energy == 0 {
            return Err(Error::InvalidConfig("meter caps must be > 0".into()));
        }
        if [
            s.hunger_interval,
            s.thirst_interval,
            s.fatigue_interval,
            s.sleep_interval,
            s.regen_interval,
            s.damage_interval,
        ]
        .contains(&0)
        {
            return Err(Error::InvalidConfig("survival intervals must be > 0".into()));
        }
        Ok(())
    }

    /// Parses a `key=value` config text on top of `self`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn apply_kv_str(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
                line: i + 1,
                message: "expected key=value".into(),
            })?;
            self.apply_kv(k.trim(), v.trim()).map_err(|e| Error::ConfigParse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        // `variant` decides the baseline agent count; honour it before the rest.
        for line in text.lines() {
            if let Some(("variant", v)) = line.trim().split_once('=').map(|(k, v)| (k.trim(), v.trim())) {
                if v.parse::<Variant>()? == Variant::Ma {
                    cfg = Self::ma(1);
                }
            }
        }
        cfg.apply_kv_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("bad value `{v}` for `{key}`")))
        }
        fn flag(key: &str, v: &str) -> Result<bool> {
            match v {
                "true" | "1" | "yes" | "on" => Ok(true),
                "false" | "0" | "no" | "off" => Ok(false),
                _ => Err(Error::InvalidConfig(format!("bad flag `{v}` for `{key}`"))),
            }
        }

        let w = &mut self.worldgen;
        let s = &mut self.survival;
        let d = &mut w.ore_density;
        match key {
            "variant" => self.variant = value.parse()?,
            "n_agents" => self.n_agents = num(key, value)?,
            "max_episode_steps" => self.max_episode_steps = num(key, value)?,
            "obs_window" => {
                let (h, wd) = value
                    .split_once('x')
                    .ok_or_else(|| Error::InvalidConfig("obs_window must look like 9x11".into()))?;
                self.obs_window = (num(key, h)?, num(key, wd)?);
            }

            "worldgen.floor_width" => w.floor_width = num(key, value)?,
            "worldgen.floor_height" => w.floor_height = num(key, value)?,
            "worldgen.n_floors" => w.n_floors = num(key, value)?,
            "worldgen.day_length" => w.day_length = num(key, value)?,
            "worldgen.spawn_radius" => w.spawn_radius = num(key, value)?,
            "worldgen.torch_radius" => w.torch_radius = num(key, value)?,
            "worldgen.zombie_damage" => w.zombie_damage = num(key, value)?,
            "worldgen.skeleton_damage" => w.skeleton_damage = num(key, value)?,
            "worldgen.skeleton_range" => w.skeleton_range = num(key, value)?,
            "worldgen.mob_cooldown" => w.mob_cooldown = num(key, value)?,
            "density.tree" => d.tree = num(key, value)?,
            "density.coal" => d.coal = num(key, value)?,
            "density.iron" => d.iron = num(key, value)?,
            "density.diamond" => d.diamond = num(key, value)?,
            "density.sapphire" => d.sapphire = num(key, value)?,
            "density.ruby" => d.ruby = num(key, value)?,
            "density.water_pool" => d.water_pool = num(key, value)?,
            "density.fountain" => d.fountain = num(key, value)?,
            "density.lava" => d.lava = num(key, value)?,

            "survival.max_health" => s.max_health = num(key, value)?,
            "survival.max_energy" => s.max_energy = num(key, value)?,
            "survival.meter_cap" => s.meter_cap = num(key, value)?,
            "survival.forager_meter_cap" => s.forager_meter_cap = num(key, value)?,
            "survival.hunger_interval" => s.hunger_interval = num(key, value)?,
            "survival.thirst_interval" => s.thirst_interval = num(key, value)?,
            "survival.fatigue_interval" => s.fatigue_interval = num(key, value)?,
            "survival.sleep_interval" => s.sleep_interval = num(key, value)?,
            "survival.regen_interval" => s.regen_interval = num(key, value)?,
            "survival.damage_interval" => s.damage_interval = num(key, value)?,
            "survival.base_damage" => s.base_damage = num(key, value)?,
            "survival.warrior_damage" => s.warrior_damage = num(key, value)?,
            "survival.plant_ripen_steps" => s.plant_ripen_steps = num(key, value)?,

            "reward.mode" => {
                self.reward.mode = match value {
                    "shared" => RewardMode::Shared,
                    "individual" => RewardMode::Individual,
                    _ => return Err(Error::InvalidConfig(format!("unknown reward mode `{value}`"))),
                }
            }
            "reward.food_water_shaping" => self.reward.food_water_shaping = flag(key, value)?,
            "reward.shaping_unit" => self.reward.shaping_unit = num(key, value)?,
            "reward.health_penalty_enabled" => self.reward.health_penalty_enabled = flag(key, value)?,
            "reward.health_penalty" => self.reward.health_penalty = num(key, value)?,

            other => {
                if let Some(kind) = other.strip_prefix("mob_cap.") {
                    let kind = MobKind::ALL
                        .into_iter()
                        .find(|k| k.name() == kind)
                        .ok_or_else(|| Error::InvalidConfig(format!("unknown mob kind `{kind}`")))?;
                    w.base_mob_cap.set(kind, num(key, value)?);
                } else if let Some(name) = other.strip_prefix("reward.weight.") {
                    let ach = Achievement::from_name(name)
                        .ok_or_else(|| Error::InvalidConfig(format!("unknown achievement `{name}`")))?;
                    self.reward.weights.set(ach, num(key, value)?);
                } else {
                    return Err(Error::InvalidConfig(format!("unknown key `{other}`")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        EnvConfig::coop().validate().unwrap();
        EnvConfig::ma(4).validate().unwrap();
    }

    #[test]
    fn coop_requires_three_agents() {
        let mut c = EnvConfig::coop();
        c.n_agents = 4;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn kv_roundtrip_of_common_keys() {
        let text = "\
# sample
variant = ma
n_agents = 4
worldgen.floor_width=40
mob_cap.zombie = 6
reward.mode = individual
reward.food_water_shaping = true
reward.weight.COLLECT_WOOD = 2
obs_window = 7x9
";
        let cfg = EnvConfig::from_kv_str(text).unwrap();
        assert_eq!(cfg.variant, Variant::Ma);
        assert_eq!(cfg.n_agents, 4);
        assert_eq!(cfg.worldgen.floor_width, 40);
        assert_eq!(cfg.worldgen.base_mob_cap.zombie, 6);
        assert_eq!(cfg.reward.mode, RewardMode::Individual);
        assert!(cfg.reward.food_water_shaping);
        assert_eq!(cfg.reward.weights.get(Achievement::CollectWood), 2.0);
        assert_eq!(cfg.obs_window, (7, 9));
    }

    #[test]
    fn kv_reports_line_of_bad_entry() {
        let err = EnvConfig::from_kv_str("n_agents=3\nbogus=1\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn densities_outside_unit_interval_rejected() {
        let mut c = EnvConfig::coop();
        c.worldgen.ore_density.coal = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_day_length_rejected() {
        let mut c = EnvConfig::coop();
        c.worldgen.day_length = 0;
        assert!(c.validate().is_err());
    }
}
