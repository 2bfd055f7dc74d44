//! Typed events emitted by one environment step. Scoring reads these; replays
//! and the gateway forward them verbatim.

use serde::{Deserialize, Serialize};

use crate::agent::{Attribute, Item, Spell};
use crate::coop::TradableResource;
use crate::world::{MobKind, TileKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id")]
pub enum Actor {
    Agent(u8),
    Mob(u16),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FoodSource {
    Cow,
    Bat,
    Plant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnchantTarget {
    Sword,
    Armour,
    Bow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Event {
    Harvest {
        agent: u8,
        item: Item,
        floor: u8,
    },
    Drink {
        agent: u8,
        source: TileKind,
    },
    Eat {
        agent: u8,
        food: FoodSource,
    },
    Craft {
        agent: u8,
        item: Item,
    },
    /// Armour crafted; `tier` is the new armour tier.
    Armour {
        agent: u8,
        tier: u8,
    },
    Place {
        agent: u8,
        tile: TileKind,
        floor: u8,
    },
    PickUp {
        agent: u8,
        tile: TileKind,
    },
    /// `attacker` hit `target` for `amount` points; mob attackers carry the
    /// mob kind for readability.
    Attack {
        attacker: Actor,
        target: Actor,
        amount: u8,
    },
    Kill {
        agent: u8,
        mob: MobKind,
        floor: u8,
        ranged: bool,
    },
    AgentDied {
        agent: u8,
    },
    Revive {
        reviver: u8,
        revived: u8,
    },
    RequestOpened {
        agent: u8,
        resource: TradableResource,
    },
    RequestCancelled {
        agent: u8,
    },
    Trade {
        giver: u8,
        receiver: u8,
        resource: TradableResource,
    },
    EnterFloor {
        agent: u8,
        floor: u8,
    },
    WakeUp {
        agent: u8,
        floor: u8,
    },
    Shoot {
        agent: u8,
    },
    Cast {
        agent: u8,
        spell: Spell,
    },
    Learn {
        agent: u8,
        spell: Spell,
    },
    DrinkPotion {
        agent: u8,
    },
    LevelUp {
        agent: u8,
        attribute: Attribute,
        value: u8,
    },
    Enchant {
        agent: u8,
        target: EnchantTarget,
    },
}

impl Event {
    /// The agent this event is credited to, if any.
    pub fn agent(&self) -> Option<u8> {
        use Event::*;
        match *self {
            Harvest { agent, .. }
            | Drink { agent, .. }
            | Eat { agent, .. }
            | Craft { agent, .. }
            | Armour { agent, .. }
            | Place { agent, .. }
            | PickUp { agent, .. }
            | Kill { agent, .. }
            | AgentDied { agent }
            | RequestOpened { agent, .. }
            | RequestCancelled { agent }
            | EnterFloor { agent, .. }
            | WakeUp { agent, .. }
            | Shoot { agent }
            | Cast { agent, .. }
            | Learn { agent, .. }
            | DrinkPotion { agent }
            | LevelUp { agent, .. }
            | Enchant { agent, .. } => Some(agent),
            Attack { attacker, .. } => match attacker {
                Actor::Agent(a) => Some(a),
                Actor::Mob(_) => None,
            },
            Revive { reviver, .. } => Some(reviver),
            Trade { giver, .. } => Some(giver),
        }
    }

    /// True when `agent` is the actor or the receiving end of the event.
    pub fn involves(&self, agent: u8) -> bool {
        match *self {
            Event::Attack { attacker, target, .. } => attacker == Actor::Agent(agent) || target == Actor::Agent(agent),
            Event::Revive { reviver, revived } => reviver == agent || revived == agent,
            Event::Trade { giver, receiver, .. } => giver == agent || receiver == agent,
            _ => self.agent() == Some(agent),
        }
    }
}
