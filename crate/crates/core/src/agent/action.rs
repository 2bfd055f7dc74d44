use serde::{Deserialize, Serialize};

use crate::config::Variant;
use crate::coop::TradableResource;
use crate::error::{Error, Result};
use crate::world::Direction;

/// Index into an [`ActionSpace`]'s table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(transparent)]
pub struct ActionId(pub u16);

impl From<u16> for ActionId {
    fn from(v: u16) -> Self {
        ActionId(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Potion {
    Red,
    Green,
    Blue,
    Pink,
    Cyan,
    Yellow,
}

impl Potion {
    pub const ALL: [Potion; 6] = [
        Potion::Red,
        Potion::Green,
        Potion::Blue,
        Potion::Pink,
        Potion::Cyan,
        Potion::Yellow,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Attribute {
    Dexterity,
    Strength,
    Intelligence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spell {
    Fireball,
    Iceball,
}

/// Decoded action semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Noop,
    Move(Direction),
    Do,
    Sleep,
    PlaceStone,
    PlaceTable,
    PlaceFurnace,
    PlacePlant,
    MakeWoodPickaxe,
    MakeStonePickaxe,
    MakeIronPickaxe,
    MakeWoodSword,
    MakeStoneSword,
    MakeIronSword,
    Rest,
    Descend,
    Ascend,
    MakeDiamondPickaxe,
    MakeDiamondSword,
    MakeIronArmour,
    MakeDiamondArmour,
    ShootArrow,
    MakeArrow,
    Cast(Spell),
    PlaceTorch,
    DrinkPotion(Potion),
    ReadBook,
    EnchantSword,
    EnchantArmour,
    MakeTorch,
    LevelUp(Attribute),
    EnchantBow,
    MakeBow,
    BrewPotion,
    WriteBook,
    Face(Direction),
    PickupTorch,
    CancelRequest,
    Reserved,
    Request(TradableResource),
    Give(u8),
}

/// The 53 base actions, in table order.
pub const BASE_ACTION_NAMES: [&str; 53] = [
    "NOOP",
    "LEFT",
    "RIGHT",
    "UP",
    "DOWN",
    "DO",
    "SLEEP",
    "PLACE_STONE",
    "PLACE_TABLE",
    "PLACE_FURNACE",
    "PLACE_PLANT",
    "MAKE_WOOD_PICKAXE",
    "MAKE_STONE_PICKAXE",
    "MAKE_IRON_PICKAXE",
    "MAKE_WOOD_SWORD",
    "MAKE_STONE_SWORD",
    "MAKE_IRON_SWORD",
    "REST",
    "DESCEND",
    "ASCEND",
    "MAKE_DIAMOND_PICKAXE",
    "MAKE_DIAMOND_SWORD",
    "MAKE_IRON_ARMOUR",
    "MAKE_DIAMOND_ARMOUR",
    "SHOOT_ARROW",
    "MAKE_ARROW",
    "CAST_FIREBALL",
    "CAST_ICEBALL",
    "PLACE_TORCH",
    "DRINK_POTION_RED",
    "DRINK_POTION_GREEN",
    "DRINK_POTION_BLUE",
    "DRINK_POTION_PINK",
    "DRINK_POTION_CYAN",
    "DRINK_POTION_YELLOW",
    "READ_BOOK",
    "ENCHANT_SWORD",
    "ENCHANT_ARMOUR",
    "MAKE_TORCH",
    "LEVEL_UP_DEXTERITY",
    "LEVEL_UP_STRENGTH",
    "LEVEL_UP_INTELLIGENCE",
    "ENCHANT_BOW",
    "MAKE_BOW",
    "BREW_POTION",
    "WRITE_BOOK",
    "FACE_LEFT",
    "FACE_RIGHT",
    "FACE_UP",
    "FACE_DOWN",
    "PICKUP_TORCH",
    "CANCEL_REQUEST",
    "RESERVED",
];

const BASE: [Action; 53] = [
    Action::Noop,
    Action::Move(Direction::West),
    Action::Move(Direction::East),
    Action::Move(Direction::North),
    Action::Move(Direction::South),
    Action::Do,
    Action::Sleep,
    Action::PlaceStone,
    Action::PlaceTable,
    Action::PlaceFurnace,
    Action::PlacePlant,
    Action::MakeWoodPickaxe,
    Action::MakeStonePickaxe,
    Action::MakeIronPickaxe,
    Action::MakeWoodSword,
    Action::MakeStoneSword,
    Action::MakeIronSword,
    Action::Rest,
    Action::Descend,
    Action::Ascend,
    Action::MakeDiamondPickaxe,
    Action::MakeDiamondSword,
    Action::MakeIronArmour,
    Action::MakeDiamondArmour,
    Action::ShootArrow,
    Action::MakeArrow,
    Action::Cast(Spell::Fireball),
    Action::Cast(Spell::Iceball),
    Action::PlaceTorch,
    Action::DrinkPotion(Potion::Red),
    Action::DrinkPotion(Potion::Green),
    Action::DrinkPotion(Potion::Blue),
    Action::DrinkPotion(Potion::Pink),
    Action::DrinkPotion(Potion::Cyan),
    Action::DrinkPotion(Potion::Yellow),
    Action::ReadBook,
    Action::EnchantSword,
    Action::EnchantArmour,
    Action::MakeTorch,
    Action::LevelUp(Attribute::Dexterity),
    Action::LevelUp(Attribute::Strength),
    Action::LevelUp(Attribute::Intelligence),
    Action::EnchantBow,
    Action::MakeBow,
    Action::BrewPotion,
    Action::WriteBook,
    Action::Face(Direction::West),
    Action::Face(Direction::East),
    Action::Face(Direction::North),
    Action::Face(Direction::South),
    Action::PickupTorch,
    Action::CancelRequest,
    Action::Reserved,
];

pub const BASE_ACTION_COUNT: u16 = 53;

/// Action table for one variant: the base block, then (coop only) one
/// `REQUEST_*` per tradable resource and one `GIVE_AGENT_*` per agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionSpace {
    pub variant: Variant,
    pub n_agents: usize,
}

impl ActionSpace {
    pub fn new(variant: Variant, n_agents: usize) -> Self {
        Self { variant, n_agents }
    }

    pub fn len(&self) -> usize {
        match self.variant {
            Variant::Ma => BASE_ACTION_COUNT as usize,
            Variant::Coop => BASE_ACTION_COUNT as usize + TradableResource::ALL.len() + self.n_agents,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn request_offset(&self) -> u16 {
        BASE_ACTION_COUNT
    }

    pub fn give_offset(&self) -> u16 {
        BASE_ACTION_COUNT + TradableResource::ALL.len() as u16
    }

    pub fn decode(&self, id: ActionId) -> Result<Action> {
        let i = id.0;
        if i < BASE_ACTION_COUNT {
            return Ok(BASE[i as usize]);
        }
        if self.variant == Variant::Coop {
            let r = (i - BASE_ACTION_COUNT) as usize;
            if r < TradableResource::ALL.len() {
                return Ok(Action::Request(TradableResource::ALL[r]));
            }
            let g = r - TradableResource::ALL.len();
            if g < self.n_agents {
                return Ok(Action::Give(g as u8));
            }
        }
        Err(Error::UnknownAction(i as u32))
    }

    pub fn encode(&self, action: Action) -> Result<ActionId> {
        match action {
            Action::Request(r) if self.variant == Variant::Coop => {
                Ok(ActionId(self.request_offset() + r.index() as u16))
            }
            Action::Give(g) if self.variant == Variant::Coop && (g as usize) < self.n_agents => {
                Ok(ActionId(self.give_offset() + g as u16))
            }
            Action::Request(_) | Action::Give(_) => Err(Error::InvalidConfig(format!(
                "{action:?} is not part of this action table"
            ))),
            a => Ok(ActionId(BASE.iter().position(|&b| b == a).expect("base action") as u16)),
        }
    }

    pub fn name(&self, id: ActionId) -> Option<String> {
        match self.decode(id).ok()? {
            Action::Request(r) => Some(format!("REQUEST_{}", r.name().to_ascii_uppercase())),
            Action::Give(g) => Some(format!("GIVE_AGENT_{g}")),
            _ => Some(BASE_ACTION_NAMES[id.0 as usize].to_string()),
        }
    }

    /// Ordered `(index, name)` manifest.
    pub fn table(&self) -> Vec<(u16, String)> {
        (0..self.len() as u16)
            .map(|i| (i, self.name(ActionId(i)).expect("in range")))
            .collect()
    }

    pub fn id_by_name(&self, name: &str) -> Option<ActionId> {
        (0..self.len() as u16)
            .map(ActionId)
            .find(|&id| self.name(id).as_deref() == Some(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ma_table_has_53_entries_and_noop_first() {
        let s = ActionSpace::new(Variant::Ma, 4);
        let t = s.table();
        assert_eq!(t.len(), 53);
        assert_eq!(t[0], (0, "NOOP".to_string()));
    }

    #[test]
    fn coop_table_layout() {
        let s = ActionSpace::new(Variant::Coop, 3);
        let t = s.table();
        // 53 base + one request per tradable resource + one give per agent.
        assert_eq!(t.len(), 53 + TradableResource::ALL.len() + 3);
        assert_eq!(t.len(), 65);
        for (i, name) in &t[53..62] {
            assert!(name.starts_with("REQUEST_"), "{i} {name}");
        }
        for (i, name) in &t[62..65] {
            assert!(name.starts_with("GIVE_AGENT_"), "{i} {name}");
        }
        assert_eq!(t[54].1, "REQUEST_STONE");
    }

    #[test]
    fn names_are_unique() {
        let s = ActionSpace::new(Variant::Coop, 3);
        let mut names: Vec<_> = s.table().into_iter().map(|(_, n)| n).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 65);
    }

    #[test]
    fn decode_encode_agree() {
        let s = ActionSpace::new(Variant::Coop, 3);
        for i in 0..s.len() as u16 {
            let a = s.decode(ActionId(i)).unwrap();
            assert_eq!(s.encode(a).unwrap(), ActionId(i));
        }
        assert!(s.decode(ActionId(65)).is_err());
        assert!(ActionSpace::new(Variant::Ma, 3).decode(ActionId(53)).is_err());
    }
}
