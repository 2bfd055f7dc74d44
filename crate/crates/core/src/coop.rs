//! Specialization capability gating and the broadcast-request / give trade
//! protocol.
//!
//! A request is a single open slot per agent naming one [`TradableResource`].
//! It stays open for [`REQUEST_TTL`] environment steps; during that window any
//! teammate may answer with `GIVE_AGENT_<requester>`, which moves exactly one
//! unit regardless of distance or floor. Requests are not closed by a
//! successful give, so several units can flow into one request.

use serde::{Deserialize, Serialize};

use crate::agent::{meter_cap, Item, Specialization};
use crate::config::SurvivalConfig;
use crate::event::{Event, FoodSource};
use crate::world::{TileKind, WorldState};

/// Steps a request stays open, counting the step it was opened in.
pub const REQUEST_TTL: u8 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum TradableResource {
    Wood,
    Stone,
    Coal,
    Iron,
    Diamond,
    Sapphire,
    Ruby,
    Food,
    Water,
}

impl TradableResource {
    pub const ALL: [TradableResource; 9] = [
        TradableResource::Wood,
        TradableResource::Stone,
        TradableResource::Coal,
        TradableResource::Iron,
        TradableResource::Diamond,
        TradableResource::Sapphire,
        TradableResource::Ruby,
        TradableResource::Food,
        TradableResource::Water,
    ];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            TradableResource::Wood => "wood",
            TradableResource::Stone => "stone",
            TradableResource::Coal => "coal",
            TradableResource::Iron => "iron",
            TradableResource::Diamond => "diamond",
            TradableResource::Sapphire => "sapphire",
            TradableResource::Ruby => "ruby",
            TradableResource::Food => "food",
            TradableResource::Water => "water",
        }
    }

    /// Inventory item backing a material; `None` for the food/water meters.
    pub fn item(self) -> Option<Item> {
        match self {
            TradableResource::Wood => Some(Item::Wood),
            TradableResource::Stone => Some(Item::Stone),
            TradableResource::Coal => Some(Item::Coal),
            TradableResource::Iron => Some(Item::Iron),
            TradableResource::Diamond => Some(Item::Diamond),
            TradableResource::Sapphire => Some(Item::Sapphire),
            TradableResource::Ruby => Some(Item::Ruby),
            TradableResource::Food | TradableResource::Water => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TradeRequest {
    pub requester: u8,
    pub resource: TradableResource,
    pub ttl: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Capability {
    CraftPickaxe,
    CraftTorch,
    PlaceTorch,
    PlaceStone,
    HuntPassive,
    DrinkSource,
    PlantSapling,
    HarvestCrop,
    CraftAdvancedSword,
    CollectBow,
    CraftArrow,
}

impl Capability {
    pub const ALL: [Capability; 11] = [
        Capability::CraftPickaxe,
        Capability::CraftTorch,
        Capability::PlaceTorch,
        Capability::PlaceStone,
        Capability::HuntPassive,
        Capability::DrinkSource,
        Capability::PlantSapling,
        Capability::HarvestCrop,
        Capability::CraftAdvancedSword,
        Capability::CollectBow,
        Capability::CraftArrow,
    ];

    /// The only specialization allowed to use this capability in coop mode.
    pub const fn owner(self) -> Specialization {
        match self {
            Capability::CraftPickaxe | Capability::CraftTorch | Capability::PlaceTorch | Capability::PlaceStone => {
                Specialization::Miner
            }
            Capability::HuntPassive | Capability::DrinkSource | Capability::PlantSapling | Capability::HarvestCrop => {
                Specialization::Forager
            }
            Capability::CraftAdvancedSword | Capability::CollectBow | Capability::CraftArrow => Specialization::Warrior,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Capability::CraftPickaxe => "craft_pickaxe",
            Capability::CraftTorch => "craft_torch",
            Capability::PlaceTorch => "place_torch",
            Capability::PlaceStone => "place_stone",
            Capability::HuntPassive => "hunt_passive",
            Capability::DrinkSource => "drink_source",
            Capability::PlantSapling => "plant_sapling",
            Capability::HarvestCrop => "harvest_crop",
            Capability::CraftAdvancedSword => "craft_advanced_sword",
            Capability::CollectBow => "collect_bow",
            Capability::CraftArrow => "craft_arrow",
        }
    }
}

#[inline]
pub fn capability_check(spec: Specialization, cap: Capability) -> bool {
    spec == Specialization::None || cap.owner() == spec
}

/// Capability an event proves its agent used, for auditing event logs.
pub fn required_capability(event: &Event) -> Option<(u8, Capability)> {
    match *event {
        Event::Drink { agent, .. } => Some((agent, Capability::DrinkSource)),
        Event::Eat { agent, food } => Some((
            agent,
            match food {
                FoodSource::Cow | FoodSource::Bat => Capability::HuntPassive,
                FoodSource::Plant => Capability::HarvestCrop,
            },
        )),
        Event::Kill { agent, mob, .. } if !mob.hostile() => Some((agent, Capability::HuntPassive)),
        Event::Craft { agent, item } => {
            let cap = match item {
                Item::WoodPickaxe | Item::StonePickaxe | Item::IronPickaxe | Item::DiamondPickaxe => {
                    Capability::CraftPickaxe
                }
                Item::Torch => Capability::CraftTorch,
                Item::StoneSword | Item::IronSword | Item::DiamondSword => Capability::CraftAdvancedSword,
                Item::Bow => Capability::CollectBow,
                Item::Arrow => Capability::CraftArrow,
                _ => return None,
            };
            Some((agent, cap))
        }
        Event::Place { agent, tile, .. } => {
            let cap = match tile {
                TileKind::Torch => Capability::PlaceTorch,
                TileKind::PlacedStone => Capability::PlaceStone,
                TileKind::Sapling => Capability::PlantSapling,
                _ => return None,
            };
            Some((agent, cap))
        }
        _ => None,
    }
}

/// Opens (or replaces) `agent`'s request. Dead agents are ignored.
pub fn open_request(state: &mut WorldState, agent: u8, resource: TradableResource, events: &mut Vec<Event>) {
    if !state.agents[agent as usize].alive {
        return;
    }
    let req = TradeRequest {
        requester: agent,
        resource,
        ttl: REQUEST_TTL,
    };
    match state.requests.binary_search_by_key(&agent, |r| r.requester) {
        Ok(i) => state.requests[i] = req,
        Err(i) => state.requests.insert(i, req),
    }
    events.push(Event::RequestOpened { agent, resource });
}

pub fn cancel_request(state: &mut WorldState, agent: u8, events: &mut Vec<Event>) {
    if let Ok(i) = state.requests.binary_search_by_key(&agent, |r| r.requester) {
        state.requests.remove(i);
        events.push(Event::RequestCancelled { agent });
    }
}

pub fn open_request_of(state: &WorldState, agent: u8) -> Option<&TradeRequest> {
    state
        .requests
        .binary_search_by_key(&agent, |r| r.requester)
        .ok()
        .map(|i| &state.requests[i])
}

/// Answers `receiver`'s open request with one unit from `giver`. Every
/// failure mode is a silent no-op. Returns whether a unit moved.
pub fn fulfill_give(
    state: &mut WorldState,
    cfg: &SurvivalConfig,
    giver: u8,
    receiver: u8,
    events: &mut Vec<Event>,
) -> bool {
    let (g, r) = (giver as usize, receiver as usize);
    if g == r || r >= state.agents.len() || !state.agents[g].alive || !state.agents[r].alive {
        return false;
    }
    let Some(resource) = open_request_of(state, receiver).map(|q| q.resource) else {
        return false;
    };

    let moved = match resource.item() {
        Some(item) => {
            if !state.agents[g].inventory.has(item, 1) || !state.agents[r].inventory.room_for(item, 1) {
                false
            } else {
                state.agents[g].inventory.take(item, 1);
                state.agents[r].inventory.add(item, 1);
                true
            }
        }
        None => {
            let cap = meter_cap(state.agents[r].specialization, cfg);
            let (giver_state, receiver_state) = pair_mut(&mut state.agents, g, r);
            let (from, to) = match resource {
                TradableResource::Food => (&mut giver_state.food, &mut receiver_state.food),
                _ => (&mut giver_state.water, &mut receiver_state.water),
            };
            if *from == 0 {
                false
            } else {
                *from -= 1;
                // Overflow beyond the receiver's cap is lost.
                *to = (*to + 1).min(cap);
                true
            }
        }
    };
    if moved {
        events.push(Event::Trade {
            giver,
            receiver,
            resource,
        });
    }
    moved
}

fn pair_mut<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &mut T) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = v.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// End-of-step bookkeeping: age every request by one step and drop expired
/// ones and those whose requester is dead.
pub fn tick_requests(state: &mut WorldState) {
    let agents = &state.agents;
    state.requests.retain_mut(|r| {
        r.ttl = r.ttl.saturating_sub(1);
        r.ttl > 0 && agents[r.requester as usize].alive
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EnvConfig;
    use crate::env::initial_state;

    fn coop_world() -> (WorldState, EnvConfig) {
        let cfg = EnvConfig::coop();
        (initial_state(5, &cfg).unwrap(), cfg)
    }

    #[test]
    fn capability_table_rows() {
        use Capability::*;
        use Specialization::*;
        assert!(!capability_check(Forager, CraftPickaxe));
        assert!(capability_check(None, CraftPickaxe));
        assert!(capability_check(Warrior, CraftAdvancedSword));
        for cap in Capability::ALL {
            let allowed: Vec<_> = [Miner, Forager, Warrior]
                .into_iter()
                .filter(|&s| capability_check(s, cap))
                .collect();
            assert_eq!(allowed, vec![cap.owner()], "{cap:?}");
        }
        let miner: Vec<_> = Capability::ALL.into_iter().filter(|&c| c.owner() == Miner).collect();
        assert_eq!(miner, vec![CraftPickaxe, CraftTorch, PlaceTorch, PlaceStone]);
        let forager: Vec<_> = Capability::ALL.into_iter().filter(|&c| c.owner() == Forager).collect();
        assert_eq!(forager, vec![HuntPassive, DrinkSource, PlantSapling, HarvestCrop]);
        let warrior: Vec<_> = Capability::ALL.into_iter().filter(|&c| c.owner() == Warrior).collect();
        assert_eq!(warrior, vec![CraftAdvancedSword, CollectBow, CraftArrow]);
    }

    #[test]
    fn tradables_are_materials_and_consumables_only() {
        let items: Vec<_> = TradableResource::ALL.iter().filter_map(|r| r.item()).collect();
        assert_eq!(
            items,
            vec![
                Item::Wood,
                Item::Stone,
                Item::Coal,
                Item::Iron,
                Item::Diamond,
                Item::Sapphire,
                Item::Ruby
            ]
        );
        assert_eq!(TradableResource::ALL.len(), 9);
    }

    #[test]
    fn open_request_inserts_with_full_ttl() {
        let (mut s, _) = coop_world();
        let mut ev = Vec::new();
        open_request(&mut s, 0, TradableResource::Stone, &mut ev);
        assert_eq!(
            s.requests,
            vec![TradeRequest {
                requester: 0,
                resource: TradableResource::Stone,
                ttl: 10
            }]
        );
    }

    #[test]
    fn second_request_replaces_first() {
        let (mut s, _) = coop_world();
        let mut ev = Vec::new();
        open_request(&mut s, 0, TradableResource::Stone, &mut ev);
        tick_requests(&mut s);
        open_request(&mut s, 0, TradableResource::Wood, &mut ev);
        assert_eq!(
            s.requests,
            vec![TradeRequest {
                requester: 0,
                resource: TradableResource::Wood,
                ttl: 10
            }]
        );
    }

    #[test]
    fn dead_agent_cannot_request() {
        let (mut s, _) = coop_world();
        s.agents[0].alive = false;
        s.agents[0].health = 0;
        let mut ev = Vec::new();
        open_request(&mut s, 0, TradableResource::Stone, &mut ev);
        assert!(s.requests.is_empty());
        assert!(ev.is_empty());
    }

    #[test]
    fn give_moves_one_stone() {
        let (mut s, cfg) = coop_world();
        let mut ev = Vec::new();
        s.agents[0].inventory.add(Item::Stone, 3);
        open_request(&mut s, 2, TradableResource::Stone, &mut ev);
        ev.clear();
        assert!(fulfill_give(&mut s, &cfg.survival, 0, 2, &mut ev));
        assert_eq!(s.agents[0].inventory.get(Item::Stone), 2);
        assert_eq!(s.agents[2].inventory.get(Item::Stone), 1);
        assert_eq!(
            ev,
            vec![Event::Trade {
                giver: 0,
                receiver: 2,
                resource: TradableResource::Stone
            }]
        );
        // Request stays open for further units.
        assert!(open_request_of(&s, 2).is_some());
    }

    #[test]
    fn unmatched_give_is_noop() {
        let (mut s, cfg) = coop_world();
        s.agents[0].inventory.add(Item::Stone, 3);
        let before = s.clone();
        let mut ev = Vec::new();
        assert!(!fulfill_give(&mut s, &cfg.survival, 0, 1, &mut ev));
        assert_eq!(s, before);
        assert!(ev.is_empty());
    }

    #[test]
    fn self_give_is_noop() {
        let (mut s, cfg) = coop_world();
        let mut ev = Vec::new();
        s.agents[0].inventory.add(Item::Stone, 3);
        open_request(&mut s, 0, TradableResource::Stone, &mut ev);
        assert!(!fulfill_give(&mut s, &cfg.survival, 0, 0, &mut ev));
        assert_eq!(s.agents[0].inventory.get(Item::Stone), 3);
    }

    #[test]
    fn give_works_across_floors() {
        let (mut s, cfg) = coop_world();
        let mut ev = Vec::new();
        s.agents[1].floor = 2;
        s.agents[1].inventory.add(Item::Iron, 1);
        open_request(&mut s, 0, TradableResource::Iron, &mut ev);
        assert!(fulfill_give(&mut s, &cfg.survival, 1, 0, &mut ev));
        assert_eq!(s.agents[0].inventory.get(Item::Iron), 1);
        assert_eq!(s.agents[1].inventory.get(Item::Iron), 0);
    }

    #[test]
    fn give_fails_when_receiver_inventory_full() {
        let (mut s, cfg) = coop_world();
        let mut ev = Vec::new();
        s.agents[0].inventory.add(Item::Stone, 3);
        s.agents[2].inventory.add(Item::Stone, 9);
        open_request(&mut s, 2, TradableResource::Stone, &mut ev);
        assert!(!fulfill_give(&mut s, &cfg.survival, 0, 2, &mut ev));
        assert_eq!(s.agents[0].inventory.get(Item::Stone), 3);
    }

    #[test]
    fn food_overflow_is_lost() {
        let (mut s, cfg) = coop_world();
        let mut ev = Vec::new();
        // Receiver (miner) already full at 9.
        open_request(&mut s, 0, TradableResource::Food, &mut ev);
        assert!(fulfill_give(&mut s, &cfg.survival, 1, 0, &mut ev));
        assert_eq!(s.agents[1].food, 11);
        assert_eq!(s.agents[0].food, 9);
    }

    #[test]
    fn request_expires_after_ttl_steps() {
        let (mut s, _) = coop_world();
        let mut ev = Vec::new();
        open_request(&mut s, 0, TradableResource::Stone, &mut ev);
        for _ in 0..9 {
            tick_requests(&mut s);
            assert!(open_request_of(&s, 0).is_some());
        }
        tick_requests(&mut s);
        assert!(s.requests.is_empty());
    }

    #[test]
    fn empty_request_set_unchanged_by_tick() {
        let (mut s, _) = coop_world();
        let before = s.clone();
        tick_requests(&mut s);
        assert_eq!(s, before);
    }

    #[test]
    fn dead_requester_request_is_dropped() {
        let (mut s, _) = coop_world();
        let mut ev = Vec::new();
        open_request(&mut s, 0, TradableResource::Stone, &mut ev);
        for _ in 0..5 {
            tick_requests(&mut s);
        }
        assert_eq!(open_request_of(&s, 0).unwrap().ttl, 5);
        s.agents[0].alive = false;
        s.agents[0].health = 0;
        tick_requests(&mut s);
        assert!(s.requests.is_empty());
    }
}
