//! Per-agent state, the action table and action resolution.

mod action;
mod resolve;
mod survival;

pub use action::{Action, ActionId, ActionSpace, Attribute, Potion, Spell, BASE_ACTION_NAMES};
pub use resolve::{apply_do, damage, near, resolve_actions, STATION_RADIUS};
pub use survival::{check_termination, survival_tick, Termination};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::SurvivalConfig;
use crate::world::{Direction, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Specialization {
    Miner,
    Forager,
    Warrior,
    /// Homogeneous agents of the base variant.
    None,
}

impl Specialization {
    /// Coop slot assignment: ids 0, 1, 2 become Miner, Forager, Warrior.
    pub const COOP_ORDER: [Specialization; 3] =
        [Specialization::Miner, Specialization::Forager, Specialization::Warrior];

    pub fn name(self) -> &'static str {
        match self {
            Specialization::Miner => "miner",
            Specialization::Forager => "forager",
            Specialization::Warrior => "warrior",
            Specialization::None => "none",
        }
    }

    /// Index into the three-way one-hot, `None` for homogeneous agents.
    pub fn one_hot_index(self) -> Option<usize> {
        match self {
            Specialization::Miner => Some(0),
            Specialization::Forager => Some(1),
            Specialization::Warrior => Some(2),
            Specialization::None => None,
        }
    }
}

macro_rules! items {
    ($($variant:ident => $name:literal, $cap:literal;)*) => {
        /// Everything an agent can hold. Tools, armour tiers, learned spells
        /// and attributes are counters too, so the whole inventory is one array.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
        #[repr(u8)]
        pub enum Item { $($variant),* }

        impl Item {
            pub const ALL: &'static [Item] = &[$(Item::$variant),*];
            pub const COUNT: usize = Item::ALL.len();

            pub const fn cap(self) -> u8 {
                match self { $(Item::$variant => $cap),* }
            }

            pub const fn name(self) -> &'static str {
                match self { $(Item::$variant => $name),* }
            }
        }
    };
}

items! {
    Wood => "wood", 9;
    Stone => "stone", 9;
    Coal => "coal", 9;
    Iron => "iron", 9;
    Diamond => "diamond", 9;
    Sapphire => "sapphire", 9;
    Ruby => "ruby", 9;
    Sapling => "sapling", 9;
    Torch => "torch", 9;
    Arrow => "arrow", 9;
    Bow => "bow", 1;
    WoodPickaxe => "wood_pickaxe", 1;
    StonePickaxe => "stone_pickaxe", 1;
    IronPickaxe => "iron_pickaxe", 1;
    DiamondPickaxe => "diamond_pickaxe", 1;
    WoodSword => "wood_sword", 1;
    StoneSword => "stone_sword", 1;
    IronSword => "iron_sword", 1;
    DiamondSword => "diamond_sword", 1;
    ArmourTier => "armour_tier", 2;
    PotionRed => "potion_red", 9;
    PotionGreen => "potion_green", 9;
    PotionBlue => "potion_blue", 9;
    PotionPink => "potion_pink", 9;
    PotionCyan => "potion_cyan", 9;
    PotionYellow => "potion_yellow", 9;
    Book => "book", 9;
    FireballLearned => "fireball_learned", 1;
    IceballLearned => "iceball_learned", 1;
    SwordEnchant => "sword_enchant", 1;
    ArmourEnchant => "armour_enchant", 1;
    BowEnchant => "bow_enchant", 1;
    Dexterity => "dexterity", 5;
    Strength => "strength", 5;
    Intelligence => "intelligence", 5;
    Xp => "xp", 9;
}

impl Item {
    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }
}

/// Serialized as a name -> count map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "BTreeMap<String, u8>", try_from = "BTreeMap<String, u8>")]
pub struct Inventory {
    counts: [u8; Item::COUNT],
}

impl Default for Inventory {
    fn default() -> Self {
        let mut counts = [0; Item::COUNT];
        counts[Item::Dexterity.index()] = 1;
        counts[Item::Strength.index()] = 1;
        counts[Item::Intelligence.index()] = 1;
        Self { counts }
    }
}

impl From<Inventory> for BTreeMap<String, u8> {
    fn from(inv: Inventory) -> Self {
        inv.iter().map(|(i, n)| (i.name().to_string(), n)).collect()
    }
}

impl TryFrom<BTreeMap<String, u8>> for Inventory {
    type Error = String;

    fn try_from(m: BTreeMap<String, u8>) -> Result<Self, String> {
        let mut inv = Inventory {
            counts: [0; Item::COUNT],
        };
        for (k, v) in m {
            let item = Item::ALL
                .iter()
                .find(|i| i.name() == k)
                .ok_or_else(|| format!("unknown item {k}"))?;
            inv.counts[item.index()] = v;
        }
        Ok(inv)
    }
}

impl Inventory {
    #[inline]
    pub fn get(&self, item: Item) -> u8 {
        self.counts[item.index()]
    }

    #[inline]
    pub fn has(&self, item: Item, n: u8) -> bool {
        self.get(item) >= n
    }

    #[inline]
    pub fn room_for(&self, item: Item, n: u8) -> bool {
        self.get(item) as u16 + n as u16 <= item.cap() as u16
    }

    /// Adds up to `n`, clamped at the item cap. Returns the amount added.
    #[inline]
    pub fn add(&mut self, item: Item, n: u8) -> u8 {
        let cur = self.counts[item.index()];
        let new = cur.saturating_add(n).min(item.cap());
        self.counts[item.index()] = new;
        new - cur
    }

    /// Removes exactly `n` if available; otherwise leaves the inventory alone.
    #[inline]
    pub fn take(&mut self, item: Item, n: u8) -> bool {
        let c = &mut self.counts[item.index()];
        if *c >= n {
            *c -= n;
            true
        } else {
            false
        }
    }

    #[inline]
    pub fn set(&mut self, item: Item, n: u8) {
        self.counts[item.index()] = n.min(item.cap());
    }

    pub fn iter(&self) -> impl Iterator<Item = (Item, u8)> + '_ {
        Item::ALL.iter().map(|&i| (i, self.get(i)))
    }

    /// Damage multiplier of the best sword held.
    pub fn weapon_multiplier(&self) -> u8 {
        if self.has(Item::DiamondSword, 1) {
            5
        } else if self.has(Item::IronSword, 1) {
            3
        } else if self.has(Item::StoneSword, 1) {
            2
        } else {
            1
        }
    }

    /// 0 = no pickaxe, 1 = wood, 2 = stone, 3 = iron, 4 = diamond.
    pub fn pickaxe_tier(&self) -> u8 {
        if self.has(Item::DiamondPickaxe, 1) {
            4
        } else if self.has(Item::IronPickaxe, 1) {
            3
        } else if self.has(Item::StonePickaxe, 1) {
            2
        } else if self.has(Item::WoodPickaxe, 1) {
            1
        } else {
            0
        }
    }

    pub fn has_sword(&self) -> bool {
        [Item::WoodSword, Item::StoneSword, Item::IronSword, Item::DiamondSword]
            .iter()
            .any(|&s| self.has(s, 1))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentState {
    pub id: u8,
    pub specialization: Specialization,
    pub floor: u8,
    pub pos: Pos,
    pub facing: Direction,
    pub health: u8,
    pub food: u8,
    pub water: u8,
    pub energy: u8,
    pub alive: bool,
    pub sleeping: bool,
    pub inventory: Inventory,
    pub damage_base: u8,
    /// Bit `f` set once the agent has stood on floor `f`.
    pub visited_floors: u16,
    pub hunger_clock: u16,
    pub thirst_clock: u16,
    pub fatigue_clock: u16,
    pub recover_clock: u16,
    pub starve_clock: u16,
}

impl AgentState {
    pub fn spawn(id: u8, specialization: Specialization, pos: Pos, cfg: &SurvivalConfig) -> Self {
        let cap = meter_cap(specialization, cfg);
        Self {
            id,
            specialization,
            floor: 0,
            pos,
            facing: Direction::South,
            health: cfg.max_health,
            food: cap,
            water: cap,
            energy: cfg.max_energy,
            alive: true,
            sleeping: false,
            inventory: Inventory::default(),
            damage_base: if specialization == Specialization::Warrior {
                cfg.warrior_damage
            } else {
                cfg.base_damage
            },
            visited_floors: 1,
            hunger_clock: 0,
            thirst_clock: 0,
            fatigue_clock: 0,
            recover_clock: 0,
            starve_clock: 0,
        }
    }

    #[inline]
    pub fn meter_cap(&self, cfg: &SurvivalConfig) -> u8 {
        meter_cap(self.specialization, cfg)
    }

    #[inline]
    pub fn facing_cell(&self) -> Pos {
        self.pos.step(self.facing)
    }
}

/// Food and water capacity; Foragers carry more.
pub fn meter_cap(spec: Specialization, cfg: &SurvivalConfig) -> u8 {
    if spec == Specialization::Forager {
        cfg.forager_meter_cap
    } else {
        cfg.meter_cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inventory_add_clamps_and_take_is_all_or_nothing() {
        let mut inv = Inventory::default();
        assert_eq!(inv.add(Item::Wood, 7), 7);
        assert_eq!(inv.add(Item::Wood, 7), 2);
        assert_eq!(inv.get(Item::Wood), 9);
        assert!(!inv.take(Item::Stone, 1));
        assert!(inv.take(Item::Wood, 9));
        assert_eq!(inv.get(Item::Wood), 0);
    }

    #[test]
    fn weapon_multipliers_follow_best_sword() {
        let mut inv = Inventory::default();
        assert_eq!(inv.weapon_multiplier(), 1);
        inv.add(Item::WoodSword, 1);
        assert_eq!(inv.weapon_multiplier(), 1);
        inv.add(Item::StoneSword, 1);
        assert_eq!(inv.weapon_multiplier(), 2);
        inv.add(Item::IronSword, 1);
        assert_eq!(inv.weapon_multiplier(), 3);
        inv.add(Item::DiamondSword, 1);
        assert_eq!(inv.weapon_multiplier(), 5);
    }

    #[test]
    fn forager_has_larger_meters() {
        let cfg = SurvivalConfig::default();
        let f = AgentState::spawn(1, Specialization::Forager, Pos::new(0, 0), &cfg);
        let m = AgentState::spawn(0, Specialization::Miner, Pos::new(1, 0), &cfg);
        assert_eq!((f.food, f.water), (12, 12));
        assert_eq!((m.food, m.water), (9, 9));
    }

    #[test]
    fn warrior_base_damage_is_double() {
        let cfg = SurvivalConfig::default();
        let w = AgentState::spawn(2, Specialization::Warrior, Pos::new(0, 0), &cfg);
        let m = AgentState::spawn(0, Specialization::Miner, Pos::new(1, 0), &cfg);
        assert_eq!(w.damage_base, 2 * m.damage_base);
    }
}
