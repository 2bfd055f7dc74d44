//! Achievements, the per-agent unlock ledger, rewards and normalized scores.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::agent::{AgentState, Attribute, Item, Specialization, Spell};
use crate::config::{EnvConfig, RewardConfig, RewardMode, Variant};
use crate::event::{EnchantTarget, Event, FoodSource};
use crate::world::{MobKind, TileKind};

/// Which specializations may earn an achievement in coop mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Eligibility {
    All,
    Only(Specialization),
    /// Exists only in the coop variant; every specialization may earn it.
    Coop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tier {
    Basic,
    Intermediate,
    Advanced,
    Floor,
    Cooperative,
}

macro_rules! achievements {
    ($($variant:ident => $name:literal, $tier:ident, $weight:literal, $elig:expr;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
        #[repr(u8)]
        pub enum Achievement { $($variant),* }

        impl Achievement {
            pub const ALL: &'static [Achievement] = &[$(Achievement::$variant),*];
            pub const COUNT: usize = Achievement::ALL.len();

            pub const fn name(self) -> &'static str {
                match self { $(Achievement::$variant => $name),* }
            }

            pub const fn tier(self) -> Tier {
                match self { $(Achievement::$variant => Tier::$tier),* }
            }

            pub const fn default_weight(self) -> f32 {
                match self { $(Achievement::$variant => $weight as f32),* }
            }

            pub const fn eligibility(self) -> Eligibility {
                use Specialization::*;
                #[allow(unused_imports)]
                use Eligibility::{All, Coop};
                match self { $(Achievement::$variant => $elig),* }
            }
        }
    };
}

const fn only(s: Specialization) -> Eligibility {
    Eligibility::Only(s)
}

achievements! {
    CollectWood => "COLLECT_WOOD", Basic, 1, All;
    PlaceTable => "PLACE_TABLE", Basic, 1, All;
    EatCow => "EAT_COW", Basic, 1, only(Forager);
    CollectSapling => "COLLECT_SAPLING", Basic, 1, All;
    CollectDrink => "COLLECT_DRINK", Basic, 1, only(Forager);
    MakeWoodPickaxe => "MAKE_WOOD_PICKAXE", Basic, 1, only(Miner);
    MakeWoodSword => "MAKE_WOOD_SWORD", Basic, 1, All;
    PlacePlant => "PLACE_PLANT", Basic, 1, only(Forager);
    DefeatZombie => "DEFEAT_ZOMBIE", Basic, 1, All;
    CollectStone => "COLLECT_STONE", Basic, 1, only(Miner);
    PlaceStone => "PLACE_STONE", Basic, 1, only(Miner);
    EatPlant => "EAT_PLANT", Basic, 1, only(Forager);
    WakeUp => "WAKE_UP", Basic, 1, All;
    CollectCoal => "COLLECT_COAL", Basic, 1, only(Miner);
    MakeStonePickaxe => "MAKE_STONE_PICKAXE", Basic, 1, only(Miner);
    MakeStoneSword => "MAKE_STONE_SWORD", Basic, 1, only(Warrior);
    CollectIron => "COLLECT_IRON", Basic, 1, only(Miner);
    PlaceFurnace => "PLACE_FURNACE", Intermediate, 3, All;
    MakeIronPickaxe => "MAKE_IRON_PICKAXE", Intermediate, 3, only(Miner);
    MakeIronSword => "MAKE_IRON_SWORD", Intermediate, 3, only(Warrior);
    DefeatSkeleton => "DEFEAT_SKELETON", Intermediate, 3, All;
    MakeArrow => "MAKE_ARROW", Intermediate, 3, only(Warrior);
    MakeTorch => "MAKE_TORCH", Intermediate, 3, only(Miner);
    PlaceTorch => "PLACE_TORCH", Intermediate, 3, only(Miner);
    CollectBow => "COLLECT_BOW", Intermediate, 3, only(Warrior);
    FireBow => "FIRE_BOW", Intermediate, 3, only(Warrior);
    EatBat => "EAT_BAT", Intermediate, 3, only(Forager);
    MakeIronArmour => "MAKE_IRON_ARMOUR", Intermediate, 3, All;
    CollectDiamond => "COLLECT_DIAMOND", Intermediate, 3, only(Miner);
    DrinkPotion => "DRINK_POTION", Intermediate, 3, All;
    BrewPotion => "BREW_POTION", Intermediate, 3, All;
    WriteBook => "WRITE_BOOK", Intermediate, 3, All;
    LearnFireball => "LEARN_FIREBALL", Intermediate, 3, All;
    CastFireball => "CAST_FIREBALL", Intermediate, 3, All;
    LevelUpDexterity => "LEVEL_UP_DEXTERITY", Intermediate, 3, All;
    LevelUpStrength => "LEVEL_UP_STRENGTH", Intermediate, 3, All;
    LevelUpIntelligence => "LEVEL_UP_INTELLIGENCE", Intermediate, 3, All;
    CollectSapphire => "COLLECT_SAPPHIRE", Advanced, 5, only(Miner);
    CollectRuby => "COLLECT_RUBY", Advanced, 5, only(Miner);
    MakeDiamondPickaxe => "MAKE_DIAMOND_PICKAXE", Advanced, 5, only(Miner);
    MakeDiamondSword => "MAKE_DIAMOND_SWORD", Advanced, 5, only(Warrior);
    MakeDiamondArmour => "MAKE_DIAMOND_ARMOUR", Advanced, 5, All;
    LearnIceball => "LEARN_ICEBALL", Advanced, 5, All;
    CastIceball => "CAST_ICEBALL", Advanced, 5, All;
    EnchantSword => "ENCHANT_SWORD", Advanced, 5, All;
    EnchantArmour => "ENCHANT_ARMOUR", Advanced, 5, All;
    EnchantBow => "ENCHANT_BOW", Advanced, 5, only(Warrior);
    MaxAttribute => "MAX_ATTRIBUTE", Advanced, 5, All;
    DefeatDeepZombie => "DEFEAT_DEEP_ZOMBIE", Advanced, 5, All;
    DefeatDeepSkeleton => "DEFEAT_DEEP_SKELETON", Advanced, 5, All;
    DrinkFromFountain => "DRINK_FROM_FOUNTAIN", Advanced, 5, only(Forager);
    WakeUpUnderground => "WAKE_UP_UNDERGROUND", Advanced, 5, All;
    DefeatMobAtRange => "DEFEAT_MOB_AT_RANGE", Advanced, 5, All;
    DefeatGraveyardMob => "DEFEAT_GRAVEYARD_MOB", Advanced, 5, All;
    EnterDungeon => "ENTER_DUNGEON", Floor, 8, All;
    EnterGnomishMines => "ENTER_GNOMISH_MINES", Floor, 8, All;
    EnterSewers => "ENTER_SEWERS", Floor, 8, All;
    EnterVault => "ENTER_VAULT", Floor, 8, All;
    EnterTrollMines => "ENTER_TROLL_MINES", Floor, 8, All;
    EnterFireRealm => "ENTER_FIRE_REALM", Floor, 8, All;
    EnterIceRealm => "ENTER_ICE_REALM", Floor, 8, All;
    EnterGraveyard => "ENTER_GRAVEYARD", Floor, 8, All;
    ReviveTeammate => "REVIVE_TEAMMATE", Cooperative, 5, Coop;
    CompleteTrade => "COMPLETE_TRADE", Cooperative, 8, Coop;
}

impl Achievement {
    /// Achievements shared by both variants.
    pub const BASE_COUNT: usize = 62;

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Achievement> {
        Achievement::ALL.iter().copied().find(|a| a.name() == name)
    }

    const FLOORS: [Achievement; 8] = [
        Achievement::EnterDungeon,
        Achievement::EnterGnomishMines,
        Achievement::EnterSewers,
        Achievement::EnterVault,
        Achievement::EnterTrollMines,
        Achievement::EnterFireRealm,
        Achievement::EnterIceRealm,
        Achievement::EnterGraveyard,
    ];

    /// Achievement for first reaching `floor` (1..=8).
    pub fn enter_floor(floor: u8) -> Option<Achievement> {
        Self::FLOORS.get((floor as usize).checked_sub(1)?).copied()
    }

    /// Whether an agent of `spec` can earn this in `variant`.
    pub fn eligible(self, variant: Variant, spec: Specialization) -> bool {
        match (variant, self.eligibility()) {
            (Variant::Ma, Eligibility::Coop) => false,
            (Variant::Ma, _) => true,
            (Variant::Coop, Eligibility::Only(s)) => s == spec,
            (Variant::Coop, _) => spec != Specialization::None,
        }
    }
}

/// Per-achievement reward weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "BTreeMap<String, f32>", try_from = "BTreeMap<String, f32>")]
pub struct WeightTable([f32; Achievement::COUNT]);

impl Default for WeightTable {
    fn default() -> Self {
        let mut w = [0.0; Achievement::COUNT];
        for &a in Achievement::ALL {
            w[a.index()] = a.default_weight();
        }
        Self(w)
    }
}

impl WeightTable {
    #[inline]
    pub fn get(&self, a: Achievement) -> f32 {
        self.0[a.index()]
    }

    pub fn set(&mut self, a: Achievement, w: f32) {
        self.0[a.index()] = w;
    }
}

impl From<WeightTable> for BTreeMap<String, f32> {
    fn from(t: WeightTable) -> Self {
        Achievement::ALL
            .iter()
            .map(|&a| (a.name().to_string(), t.get(a)))
            .collect()
    }
}

impl TryFrom<BTreeMap<String, f32>> for WeightTable {
    type Error = String;

    fn try_from(m: BTreeMap<String, f32>) -> Result<Self, String> {
        let mut t = WeightTable::default();
        for (k, v) in m {
            let a = Achievement::from_name(&k).ok_or_else(|| format!("unknown achievement {k}"))?;
            t.set(a, v);
        }
        Ok(t)
    }
}

/// Which agent unlocked which achievement, one bit per achievement.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AchievementLedger {
    unlocked: Vec<u64>,
}

impl AchievementLedger {
    pub fn new(n_agents: usize) -> Self {
        Self {
            unlocked: vec![0; n_agents],
        }
    }

    #[inline]
    pub fn has(&self, agent: usize, a: Achievement) -> bool {
        self.unlocked[agent] & (1u64 << a.index()) != 0
    }

    /// Marks `a` for `agent`; true when this is the first unlock.
    #[inline]
    pub fn unlock(&mut self, agent: usize, a: Achievement) -> bool {
        let bit = 1u64 << a.index();
        let fresh = self.unlocked[agent] & bit == 0;
        self.unlocked[agent] |= bit;
        fresh
    }

    pub fn is_empty(&self) -> bool {
        self.unlocked.iter().all(|&m| m == 0)
    }

    pub fn n_agents(&self) -> usize {
        self.unlocked.len()
    }

    pub fn agent(&self, agent: usize) -> impl Iterator<Item = Achievement> + '_ {
        let mask = self.unlocked[agent];
        Achievement::ALL
            .iter()
            .copied()
            .filter(move |a| mask & (1u64 << a.index()) != 0)
    }

    /// Number of distinct (agent, achievement) pairs unlocked.
    pub fn total(&self) -> usize {
        self.unlocked.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Names each agent has unlocked, in table order.
    pub fn summary(&self) -> Vec<Vec<&'static str>> {
        (0..self.unlocked.len())
            .map(|i| self.agent(i).map(|a| a.name()).collect())
            .collect()
    }
}

/// Achievements an event grants, paired with the credited agent.
pub fn achievements_of(event: &Event, out: &mut Vec<(u8, Achievement)>) {
    use Achievement as A;
    match *event {
        Event::Harvest { agent, item, .. } => {
            let a = match item {
                Item::Wood => A::CollectWood,
                Item::Sapling => A::CollectSapling,
                Item::Stone => A::CollectStone,
                Item::Coal => A::CollectCoal,
                Item::Iron => A::CollectIron,
                Item::Diamond => A::CollectDiamond,
                Item::Sapphire => A::CollectSapphire,
                Item::Ruby => A::CollectRuby,
                _ => return,
            };
            out.push((agent, a));
        }
        Event::Drink { agent, source } => {
            out.push((agent, A::CollectDrink));
            if source == TileKind::Fountain {
                out.push((agent, A::DrinkFromFountain));
            }
        }
        Event::Eat { agent, food } => out.push((
            agent,
            match food {
                FoodSource::Cow => A::EatCow,
                FoodSource::Bat => A::EatBat,
                FoodSource::Plant => A::EatPlant,
            },
        )),
        Event::Craft { agent, item } => {
            let a = match item {
                Item::WoodPickaxe => A::MakeWoodPickaxe,
                Item::StonePickaxe => A::MakeStonePickaxe,
                Item::IronPickaxe => A::MakeIronPickaxe,
                Item::DiamondPickaxe => A::MakeDiamondPickaxe,
                Item::WoodSword => A::MakeWoodSword,
                Item::StoneSword => A::MakeStoneSword,
                Item::IronSword => A::MakeIronSword,
                Item::DiamondSword => A::MakeDiamondSword,
                Item::Arrow => A::MakeArrow,
                Item::Torch => A::MakeTorch,
                Item::Bow => A::CollectBow,
                Item::Book => A::WriteBook,
                Item::PotionRed
                | Item::PotionGreen
                | Item::PotionBlue
                | Item::PotionPink
                | Item::PotionCyan
                | Item::PotionYellow => A::BrewPotion,
                _ => return,
            };
            out.push((agent, a));
        }
        Event::Armour { agent, tier } => out.push((
            agent,
            if tier >= 2 {
                A::MakeDiamondArmour
            } else {
                A::MakeIronArmour
            },
        )),
        Event::Place { agent, tile, .. } => {
            let a = match tile {
                TileKind::CraftingTable => A::PlaceTable,
                TileKind::Furnace => A::PlaceFurnace,
                TileKind::PlacedStone => A::PlaceStone,
                TileKind::Torch => A::PlaceTorch,
                TileKind::Sapling => A::PlacePlant,
                _ => return,
            };
            out.push((agent, a));
        }
        Event::Kill {
            agent,
            mob,
            floor,
            ranged,
        } => {
            if !mob.hostile() {
                return;
            }
            out.push((
                agent,
                if mob == MobKind::Zombie {
                    A::DefeatZombie
                } else {
                    A::DefeatSkeleton
                },
            ));
            if mob == MobKind::Zombie && floor >= 3 {
                out.push((agent, A::DefeatDeepZombie));
            }
            if mob == MobKind::Skeleton && floor >= 5 {
                out.push((agent, A::DefeatDeepSkeleton));
            }
            if ranged {
                out.push((agent, A::DefeatMobAtRange));
            }
            if floor == 8 {
                out.push((agent, A::DefeatGraveyardMob));
            }
        }
        Event::Revive { reviver, .. } => out.push((reviver, A::ReviveTeammate)),
        Event::Trade { giver, receiver, .. } => {
            out.push((giver, A::CompleteTrade));
            out.push((receiver, A::CompleteTrade));
        }
        Event::EnterFloor { agent, floor } => {
            if let Some(a) = A::enter_floor(floor) {
                out.push((agent, a));
            }
        }
        Event::WakeUp { agent, floor } => {
            out.push((agent, A::WakeUp));
            if floor >= 1 {
                out.push((agent, A::WakeUpUnderground));
            }
        }
        Event::Shoot { agent } => out.push((agent, A::FireBow)),
        Event::Cast { agent, spell } => out.push((
            agent,
            match spell {
                Spell::Fireball => A::CastFireball,
                Spell::Iceball => A::CastIceball,
            },
        )),
        Event::Learn { agent, spell } => out.push((
            agent,
            match spell {
                Spell::Fireball => A::LearnFireball,
                Spell::Iceball => A::LearnIceball,
            },
        )),
        Event::DrinkPotion { agent } => out.push((agent, A::DrinkPotion)),
        Event::LevelUp {
            agent,
            attribute,
            value,
        } => {
            out.push((
                agent,
                match attribute {
                    Attribute::Dexterity => A::LevelUpDexterity,
                    Attribute::Strength => A::LevelUpStrength,
                    Attribute::Intelligence => A::LevelUpIntelligence,
                },
            ));
            if value >= Item::Dexterity.cap() {
                out.push((agent, A::MaxAttribute));
            }
        }
        Event::Enchant { agent, target } => out.push((
            agent,
            match target {
                EnchantTarget::Sword => A::EnchantSword,
                EnchantTarget::Armour => A::EnchantArmour,
                EnchantTarget::Bow => A::EnchantBow,
            },
        )),
        Event::PickUp { .. }
        | Event::Attack { .. }
        | Event::AgentDied { .. }
        | Event::RequestOpened { .. }
        | Event::RequestCancelled { .. } => {}
    }
}

/// Folds this step's events into the ledger. Returns first-time unlocks in
/// event order; ineligible pairs are ignored.
pub fn record_achievements(
    ledger: &mut AchievementLedger,
    agents: &[AgentState],
    variant: Variant,
    events: &[Event],
) -> Vec<(u8, Achievement)> {
    let mut grants = Vec::new();
    for e in events {
        achievements_of(e, &mut grants);
    }
    grants.retain(|&(agent, a)| {
        a.eligible(variant, agents[agent as usize].specialization) && ledger.unlock(agent as usize, a)
    });
    grants
}

/// Health, food and water of one agent, captured before a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meters {
    pub health: u8,
    pub food: u8,
    pub water: u8,
}

impl Meters {
    pub fn of(a: &AgentState) -> Self {
        Self {
            health: a.health,
            food: a.food,
            water: a.water,
        }
    }
}

/// Per-agent reward terms for one step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub achievement: Vec<f32>,
    pub shaping: Vec<f32>,
    pub penalty: Vec<f32>,
}

impl RewardBreakdown {
    pub fn total(&self) -> Vec<f32> {
        (0..self.achievement.len())
            .map(|i| self.achievement[i] + self.shaping[i] + self.penalty[i])
            .collect()
    }
}

/// Rewards for one step. In shared mode every agent receives the team's
/// achievement points; shaping and health penalty stay per agent.
pub fn compute_rewards(
    cfg: &RewardConfig,
    unlocks: &[(u8, Achievement)],
    before: &[Meters],
    agents: &[AgentState],
) -> RewardBreakdown {
    let n = agents.len();
    let mut achievement = vec![0.0f32; n];
    for &(agent, a) in unlocks {
        achievement[agent as usize] += cfg.weights.get(a);
    }
    if cfg.mode == RewardMode::Shared {
        let team: f32 = achievement.iter().sum();
        achievement.iter_mut().for_each(|x| *x = team);
    }
    let mut shaping = vec![0.0f32; n];
    let mut penalty = vec![0.0f32; n];
    for (i, a) in agents.iter().enumerate() {
        let b = before[i];
        if cfg.food_water_shaping {
            let delta = (a.food as i32 - b.food as i32) + (a.water as i32 - b.water as i32);
            shaping[i] = cfg.shaping_unit * delta as f32;
        }
        if cfg.health_penalty_enabled {
            let lost = b.health.saturating_sub(a.health);
            penalty[i] = -cfg.health_penalty * lost as f32;
        }
    }
    RewardBreakdown {
        achievement,
        shaping,
        penalty,
    }
}

/// Largest achievable achievement total for a team with `specs`.
pub fn max_total(weights: &WeightTable, variant: Variant, specs: &[Specialization]) -> f32 {
    specs
        .iter()
        .map(|&s| {
            Achievement::ALL
                .iter()
                .filter(|a| a.eligible(variant, s))
                .map(|&a| weights.get(a))
                .sum::<f32>()
        })
        .sum()
}

/// Largest achievable total for one agent of `spec`.
pub fn max_per_agent(weights: &WeightTable, variant: Variant, spec: Specialization) -> f32 {
    max_total(weights, variant, &[spec])
}

/// Sum of the weights of every eligible unlocked pair for each agent.
pub fn unlocked_weight(ledger: &AchievementLedger, weights: &WeightTable) -> Vec<f32> {
    (0..ledger.n_agents())
        .map(|i| ledger.agent(i).map(|a| weights.get(a)).sum())
        .collect()
}

/// Percentage-of-maximum score in `[0, 100]`.
///
/// Coop: team weight total over the team maximum. MA: mean per-agent total
/// over the single-agent maximum.
pub fn score_percent(cfg: &EnvConfig, ledger: &AchievementLedger, agents: &[AgentState]) -> f32 {
    let w = &cfg.reward.weights;
    let per_agent = unlocked_weight(ledger, w);
    let specs: Vec<_> = agents.iter().map(|a| a.specialization).collect();
    let frac = match cfg.variant {
        Variant::Coop => per_agent.iter().sum::<f32>() / max_total(w, cfg.variant, &specs),
        Variant::Ma => {
            let max = max_per_agent(w, Variant::Ma, Specialization::None);
            per_agent.iter().sum::<f32>() / per_agent.len() as f32 / max
        }
    };
    100.0 * frac
}
