//! Two-phase action resolution: simultaneous movement, then interactions in
//! ascending agent id.

use super::{Action, Attribute, Item, Potion, Spell};
use crate::config::{EnvConfig, Variant};
use crate::coop::{self, capability_check, Capability};
use crate::event::{Actor, EnchantTarget, Event, FoodSource};
use crate::rng::RngState;
use crate::world::{recompute_light, MobKind, Plant, Pos, TileKind, WorldState};

/// Reach of arrows and spells, in cells.
pub const PROJECTILE_RANGE: i32 = 4;
/// Chebyshev radius for "near a crafting table / furnace".
pub const STATION_RADIUS: i32 = 2;
const SPELL_ENERGY: u8 = 2;

/// Applies `amount` damage from `attacker` to `target`. Agent targets get
/// armour reduction (never below 1). Returns whether the target died.
pub fn damage(
    state: &mut WorldState,
    attacker: Actor,
    target: Actor,
    amount: u8,
    ranged: bool,
    events: &mut Vec<Event>,
) -> bool {
    match target {
        Actor::Agent(t) => {
            let a = &mut state.agents[t as usize];
            if !a.alive {
                return false;
            }
            let armour = a.inventory.get(Item::ArmourTier);
            let amt = amount.saturating_sub(armour).max(1);
            a.health = a.health.saturating_sub(amt);
            a.sleeping = false;
            events.push(Event::Attack {
                attacker,
                target,
                amount: amt,
            });
            if a.health == 0 {
                a.alive = false;
                events.push(Event::AgentDied { agent: t });
                true
            } else {
                false
            }
        }
        Actor::Mob(m) => {
            let mob = &mut state.mobs[m as usize];
            if mob.health == 0 {
                return false;
            }
            let amt = amount.min(mob.health);
            mob.health -= amt;
            events.push(Event::Attack {
                attacker,
                target,
                amount: amt,
            });
            if mob.health == 0 {
                if let Actor::Agent(a) = attacker {
                    events.push(Event::Kill {
                        agent: a,
                        mob: mob.kind,
                        floor: mob.floor,
                        ranged,
                    });
                }
                true
            } else {
                false
            }
        }
    }
}

/// Resolves one joint action. `actions[i]` belongs to agent `i`; dead agents
/// are skipped regardless of their action.
pub fn resolve_actions(
    state: &mut WorldState,
    actions: &[Action],
    cfg: &EnvConfig,
    rng: &mut RngState,
    events: &mut Vec<Event>,
) {
    resolve_movement(state, actions, events);
    for (i, &action) in actions.iter().enumerate() {
        if state.agents[i].alive {
            interact(state, i, action, cfg, rng, events);
        }
    }
}

fn resolve_movement(state: &mut WorldState, actions: &[Action], events: &mut Vec<Event>) {
    let n = state.agents.len();
    let mut target: Vec<Option<Pos>> = vec![None; n];
    for (i, &action) in actions.iter().enumerate() {
        let Action::Move(dir) = action else { continue };
        let a = &mut state.agents[i];
        if !a.alive {
            continue;
        }
        a.facing = dir;
        let to = a.pos.step(dir);
        let (floor, fl) = (a.floor, &state.floors[a.floor as usize]);
        if fl.get(to).walkable() && state.mob_at(floor, to).is_none() {
            target[i] = Some(to);
        }
    }

    // Two movers into one cell: both stay.
    for i in 0..n {
        let Some(t) = target[i] else { continue };
        let f = state.agents[i].floor;
        let clash = (0..n).any(|j| j != i && target[j] == Some(t) && state.agents[j].floor == f);
        if clash {
            for j in 0..n {
                if target[j] == Some(t) && state.agents[j].floor == f {
                    target[j] = None;
                }
            }
        }
    }

    // A mover may follow into a cell that is being vacated; anything blocked
    // by a staying agent (or a head-on swap) is rejected, to a fixpoint.
    loop {
        let mut changed = false;
        for i in 0..n {
            let Some(t) = target[i] else { continue };
            let f = state.agents[i].floor;
            let Some(j) = state.agent_at(f, t) else { continue };
            let blocked = match target[j] {
                None => true,
                Some(tj) => tj == state.agents[i].pos,
            };
            if blocked {
                target[i] = None;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    for i in 0..n {
        if let Some(t) = target[i] {
            state.agents[i].pos = t;
        }
    }
    for i in 0..n {
        let a = &state.agents[i];
        if target[i].is_some() && state.floors[a.floor as usize].get(a.pos) == TileKind::Lava {
            let a = &mut state.agents[i];
            a.health = 0;
            a.alive = false;
            events.push(Event::AgentDied { agent: i as u8 });
        }
    }
}

fn interact(
    state: &mut WorldState,
    i: usize,
    action: Action,
    cfg: &EnvConfig,
    rng: &mut RngState,
    events: &mut Vec<Event>,
) {
    let id = i as u8;
    let spec = state.agents[i].specialization;
    let can = |c: Capability| capability_check(spec, c);
    match action {
        Action::Noop | Action::Rest | Action::Reserved | Action::Move(_) => {}
        Action::Face(d) => state.agents[i].facing = d,
        Action::Do => apply_do(state, i, cfg, rng, events),
        Action::Sleep => state.agents[i].sleeping = true,

        Action::PlaceStone if can(Capability::PlaceStone) => {
            place(state, i, Item::Stone, TileKind::PlacedStone, true, events);
        }
        Action::PlaceTable => {
            place(state, i, Item::Wood, TileKind::CraftingTable, false, events);
        }
        Action::PlaceFurnace if near(state, i, TileKind::CraftingTable) => {
            place(state, i, Item::Stone, TileKind::Furnace, false, events);
        }
        Action::PlacePlant if can(Capability::PlantSapling) => {
            let a = &state.agents[i];
            let (f, c) = (a.floor, a.facing_cell());
            if a.inventory.has(Item::Sapling, 1)
                && state.floors[f as usize].get(c) == TileKind::Grass
                && !state.occupied(f, c)
            {
                state.agents[i].inventory.take(Item::Sapling, 1);
                state.floors[f as usize].set(c, TileKind::Sapling);
                state.plants.push(Plant {
                    floor: f,
                    pos: c,
                    age: 0,
                });
                events.push(Event::Place {
                    agent: id,
                    tile: TileKind::Sapling,
                    floor: f,
                });
            }
        }
        Action::PlaceTorch if can(Capability::PlaceTorch) => {
            if place(state, i, Item::Torch, TileKind::Torch, false, events) {
                let f = state.agents[i].floor as usize;
                recompute_light(&mut state.floors[f], cfg.worldgen.torch_radius);
            }
        }
        Action::PickupTorch => {
            let a = &state.agents[i];
            let (f, c) = (a.floor as usize, a.facing_cell());
            if state.floors[f].get(c) == TileKind::Torch && a.inventory.room_for(Item::Torch, 1) {
                state.agents[i].inventory.add(Item::Torch, 1);
                state.floors[f].set(c, TileKind::Path);
                recompute_light(&mut state.floors[f], cfg.worldgen.torch_radius);
                events.push(Event::PickUp {
                    agent: id,
                    tile: TileKind::Torch,
                });
            }
        }

        Action::MakeWoodPickaxe if can(Capability::CraftPickaxe) => {
            craft(state, i, &[(Item::Wood, 1)], false, Item::WoodPickaxe, 1, events)
        }
        Action::MakeStonePickaxe if can(Capability::CraftPickaxe) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Stone, 1)],
            false,
            Item::StonePickaxe,
            1,
            events,
        ),
        Action::MakeIronPickaxe if can(Capability::CraftPickaxe) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Stone, 1), (Item::Iron, 1), (Item::Coal, 1)],
            true,
            Item::IronPickaxe,
            1,
            events,
        ),
        Action::MakeDiamondPickaxe if can(Capability::CraftPickaxe) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Diamond, 3)],
            false,
            Item::DiamondPickaxe,
            1,
            events,
        ),
        Action::MakeWoodSword => craft(state, i, &[(Item::Wood, 1)], false, Item::WoodSword, 1, events),
        Action::MakeStoneSword if can(Capability::CraftAdvancedSword) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Stone, 1)],
            false,
            Item::StoneSword,
            1,
            events,
        ),
        Action::MakeIronSword if can(Capability::CraftAdvancedSword) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Stone, 1), (Item::Iron, 1), (Item::Coal, 1)],
            true,
            Item::IronSword,
            1,
            events,
        ),
        Action::MakeDiamondSword if can(Capability::CraftAdvancedSword) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Diamond, 2)],
            false,
            Item::DiamondSword,
            1,
            events,
        ),
        Action::MakeIronArmour => armour(state, i, &[(Item::Iron, 2), (Item::Coal, 2)], true, 1, events),
        Action::MakeDiamondArmour => armour(state, i, &[(Item::Diamond, 2)], false, 2, events),
        Action::MakeArrow if can(Capability::CraftArrow) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Stone, 1)],
            false,
            Item::Arrow,
            2,
            events,
        ),
        Action::MakeTorch if can(Capability::CraftTorch) => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Coal, 1)],
            false,
            Item::Torch,
            4,
            events,
        ),
        Action::MakeBow if can(Capability::CollectBow) => {
            craft(state, i, &[(Item::Wood, 2)], false, Item::Bow, 1, events)
        }
        Action::WriteBook => craft(
            state,
            i,
            &[(Item::Wood, 1), (Item::Ruby, 1)],
            false,
            Item::Book,
            1,
            events,
        ),
        Action::BrewPotion => {
            let potion = POTION_ITEMS[rng.below(POTION_ITEMS.len() as u32) as usize];
            if near(state, i, TileKind::Furnace) {
                craft_at(state, i, &[(Item::Sapphire, 1)], potion, 1, events);
            }
        }

        Action::Descend => change_floor(state, i, true, events),
        Action::Ascend => change_floor(state, i, false, events),

        Action::ShootArrow => {
            let inv = &state.agents[i].inventory;
            if inv.has(Item::Bow, 1) && inv.has(Item::Arrow, 1) {
                state.agents[i].inventory.take(Item::Arrow, 1);
                events.push(Event::Shoot { agent: id });
                projectile(state, i, events);
            }
        }
        Action::Cast(spell) => {
            let flag = match spell {
                Spell::Fireball => Item::FireballLearned,
                Spell::Iceball => Item::IceballLearned,
            };
            let a = &state.agents[i];
            if a.inventory.has(flag, 1) && a.energy >= SPELL_ENERGY {
                state.agents[i].energy -= SPELL_ENERGY;
                events.push(Event::Cast { agent: id, spell });
                projectile(state, i, events);
            }
        }
        Action::ReadBook => {
            let inv = &state.agents[i].inventory;
            let spell = if !inv.has(Item::FireballLearned, 1) {
                Some((Spell::Fireball, Item::FireballLearned))
            } else if !inv.has(Item::IceballLearned, 1) {
                Some((Spell::Iceball, Item::IceballLearned))
            } else {
                None
            };
            if let Some((spell, flag)) = spell {
                if state.agents[i].inventory.take(Item::Book, 1) {
                    state.agents[i].inventory.add(flag, 1);
                    events.push(Event::Learn { agent: id, spell });
                }
            }
        }
        Action::DrinkPotion(p) => {
            let item = POTION_ITEMS[p as usize];
            let max_h = cfg.survival.max_health;
            let max_e = cfg.survival.max_energy;
            let a = &mut state.agents[i];
            if a.inventory.take(item, 1) {
                match p {
                    Potion::Red | Potion::Pink | Potion::Yellow => a.health = (a.health + 2).min(max_h),
                    Potion::Green | Potion::Blue | Potion::Cyan => a.energy = (a.energy + 2).min(max_e),
                }
                events.push(Event::DrinkPotion { agent: id });
            }
        }
        Action::EnchantSword => {
            if state.agents[i].inventory.has_sword() {
                enchant(state, i, Item::Ruby, Item::SwordEnchant, EnchantTarget::Sword, events)
            }
        }
        Action::EnchantArmour => {
            if state.agents[i].inventory.has(Item::ArmourTier, 1) {
                enchant(
                    state,
                    i,
                    Item::Sapphire,
                    Item::ArmourEnchant,
                    EnchantTarget::Armour,
                    events,
                )
            }
        }
        Action::EnchantBow => {
            if state.agents[i].inventory.has(Item::Bow, 1) {
                enchant(state, i, Item::Ruby, Item::BowEnchant, EnchantTarget::Bow, events)
            }
        }
        Action::LevelUp(attr) => {
            let item = match attr {
                Attribute::Dexterity => Item::Dexterity,
                Attribute::Strength => Item::Strength,
                Attribute::Intelligence => Item::Intelligence,
            };
            let inv = &mut state.agents[i].inventory;
            if inv.room_for(item, 1) && inv.take(Item::Xp, 1) {
                inv.add(item, 1);
                let value = inv.get(item);
                events.push(Event::LevelUp {
                    agent: id,
                    attribute: attr,
                    value,
                });
            }
        }

        Action::CancelRequest => coop::cancel_request(state, id, events),
        Action::Request(r) if cfg.variant == Variant::Coop => coop::open_request(state, id, r, events),
        Action::Give(g) if cfg.variant == Variant::Coop => {
            coop::fulfill_give(state, &cfg.survival, id, g, events);
        }
        // Capability or station requirement not met.
        _ => {}
    }
}

const POTION_ITEMS: [Item; 6] = [
    Item::PotionRed,
    Item::PotionGreen,
    Item::PotionBlue,
    Item::PotionPink,
    Item::PotionCyan,
    Item::PotionYellow,
];

/// Whether agent `i` stands within [`STATION_RADIUS`] of a `station` tile.
pub fn near(state: &WorldState, i: usize, station: TileKind) -> bool {
    let a = &state.agents[i];
    let fl = &state.floors[a.floor as usize];
    let r = STATION_RADIUS as i16;
    (-r..=r).any(|dy| (-r..=r).any(|dx| fl.get(Pos::new(a.pos.x + dx, a.pos.y + dy)) == station))
}

fn place(
    state: &mut WorldState,
    i: usize,
    cost: Item,
    tile: TileKind,
    onto_liquid: bool,
    events: &mut Vec<Event>,
) -> bool {
    let a = &state.agents[i];
    let (f, c) = (a.floor, a.facing_cell());
    let under = state.floors[f as usize].get(c);
    let ok_tile = under.placeable() || (onto_liquid && matches!(under, TileKind::Water | TileKind::Lava));
    if !ok_tile || state.occupied(f, c) || !a.inventory.has(cost, 1) {
        return false;
    }
    state.agents[i].inventory.take(cost, 1);
    state.floors[f as usize].set(c, tile);
    events.push(Event::Place {
        agent: i as u8,
        tile,
        floor: f,
    });
    true
}

fn craft(
    state: &mut WorldState,
    i: usize,
    cost: &[(Item, u8)],
    needs_furnace: bool,
    out: Item,
    amount: u8,
    events: &mut Vec<Event>,
) {
    if !near(state, i, TileKind::CraftingTable) || (needs_furnace && !near(state, i, TileKind::Furnace)) {
        return;
    }
    craft_at(state, i, cost, out, amount, events);
}

fn craft_at(state: &mut WorldState, i: usize, cost: &[(Item, u8)], out: Item, amount: u8, events: &mut Vec<Event>) {
    let inv = &mut state.agents[i].inventory;
    if !inv.room_for(out, 1) || !cost.iter().all(|&(it, n)| inv.has(it, n)) {
        return;
    }
    for &(it, n) in cost {
        inv.take(it, n);
    }
    inv.add(out, amount);
    events.push(Event::Craft {
        agent: i as u8,
        item: out,
    });
}

fn armour(
    state: &mut WorldState,
    i: usize,
    cost: &[(Item, u8)],
    needs_furnace: bool,
    tier: u8,
    events: &mut Vec<Event>,
) {
    if !near(state, i, TileKind::CraftingTable) || (needs_furnace && !near(state, i, TileKind::Furnace)) {
        return;
    }
    let inv = &mut state.agents[i].inventory;
    if inv.get(Item::ArmourTier) >= tier || !cost.iter().all(|&(it, n)| inv.has(it, n)) {
        return;
    }
    for &(it, n) in cost {
        inv.take(it, n);
    }
    inv.set(Item::ArmourTier, tier);
    events.push(Event::Armour { agent: i as u8, tier });
}

fn enchant(state: &mut WorldState, i: usize, gem: Item, flag: Item, target: EnchantTarget, events: &mut Vec<Event>) {
    if !near(state, i, TileKind::Furnace) {
        return;
    }
    let inv = &mut state.agents[i].inventory;
    if inv.has(flag, 1) || !inv.take(gem, 1) {
        return;
    }
    inv.add(flag, 1);
    events.push(Event::Enchant { agent: i as u8, target });
}

/// Nearest free safe cell to `anchor` on `floor`, searching outwards in
/// Chebyshev rings (ties broken by row, then column).
pub(crate) fn arrival_cell(state: &WorldState, floor: u8, anchor: Pos) -> Option<Pos> {
    let fl = &state.floors[floor as usize];
    for r in 0..8i16 {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs().max(dy.abs()) != r {
                    continue;
                }
                let p = Pos::new(anchor.x + dx, anchor.y + dy);
                if fl.get(p).safe() && !state.occupied(floor, p) {
                    return Some(p);
                }
            }
        }
    }
    None
}

fn change_floor(state: &mut WorldState, i: usize, down: bool, events: &mut Vec<Event>) {
    let a = &state.agents[i];
    let here = state.floors[a.floor as usize].get(a.pos);
    let to = if down {
        if here != TileKind::LadderDown || a.floor as usize + 1 >= state.floors.len() {
            return;
        }
        a.floor + 1
    } else {
        if here != TileKind::LadderUp || a.floor == 0 {
            return;
        }
        a.floor - 1
    };
    let fl = &state.floors[to as usize];
    let anchor = if down { fl.ladder_up } else { fl.ladder_down };
    let Some(anchor) = anchor else { return };
    let Some(p) = arrival_cell(state, to, anchor) else {
        return;
    };
    let a = &mut state.agents[i];
    a.floor = to;
    a.pos = p;
    if a.visited_floors & (1 << to) == 0 {
        a.visited_floors |= 1 << to;
        a.inventory.add(Item::Xp, 1);
    }
    events.push(Event::EnterFloor {
        agent: i as u8,
        floor: to,
    });
}

fn projectile(state: &mut WorldState, i: usize, events: &mut Vec<Event>) {
    let a = &state.agents[i];
    let (f, dir, dmg) = (a.floor, a.facing, a.damage_base.saturating_mul(2));
    let mut p = a.pos;
    for _ in 0..PROJECTILE_RANGE {
        p = p.step(dir);
        if let Some(m) = state.mob_at(f, p) {
            damage(state, Actor::Agent(i as u8), Actor::Mob(m as u16), dmg, true, events);
            return;
        }
        if let Some(j) = state.agent_at(f, p) {
            if state.agents[j].alive {
                damage(state, Actor::Agent(i as u8), Actor::Agent(j as u8), dmg, true, events);
                return;
            }
        }
        if !state.floors[f as usize].get(p).walkable() {
            return;
        }
    }
}

/// The DO action on the faced cell: revive, attack, or harvest, in that order.
pub fn apply_do(state: &mut WorldState, i: usize, cfg: &EnvConfig, rng: &mut RngState, events: &mut Vec<Event>) {
    let id = i as u8;
    let a = &state.agents[i];
    let (f, c, spec) = (a.floor, a.facing_cell(), a.specialization);

    if let Some(j) = state.agent_at(f, c) {
        if !state.agents[j].alive {
            if cfg.variant == Variant::Coop {
                let t = &mut state.agents[j];
                t.alive = true;
                t.health = 1;
                t.sleeping = false;
                t.starve_clock = 0;
                t.recover_clock = 0;
                events.push(Event::Revive {
                    reviver: id,
                    revived: j as u8,
                });
            }
        } else {
            let dmg = a.damage_base.saturating_mul(a.inventory.weapon_multiplier());
            damage(state, Actor::Agent(id), Actor::Agent(j as u8), dmg, false, events);
        }
        return;
    }

    if let Some(m) = state.mob_at(f, c) {
        let kind = state.mobs[m].kind;
        if !kind.hostile() && !capability_check(spec, Capability::HuntPassive) {
            return;
        }
        let dmg = a.damage_base.saturating_mul(a.inventory.weapon_multiplier());
        let killed = damage(state, Actor::Agent(id), Actor::Mob(m as u16), dmg, false, events);
        if killed && !kind.hostile() {
            let cap = state.agents[i].meter_cap(&cfg.survival);
            let (gain, food) = match kind {
                MobKind::Cow => (6, FoodSource::Cow),
                _ => (3, FoodSource::Bat),
            };
            let ag = &mut state.agents[i];
            ag.food = (ag.food + gain).min(cap);
            events.push(Event::Eat { agent: id, food });
        }
        return;
    }

    let tile = state.floors[f as usize].get(c);
    let tier = a.inventory.pickaxe_tier();
    let mine = |need: u8, item: Item, after: TileKind| (tier >= need).then_some((item, after));
    let harvest = match tile {
        TileKind::Tree => Some((Item::Wood, TileKind::Grass)),
        TileKind::Stone | TileKind::PlacedStone => mine(1, Item::Stone, TileKind::Path),
        TileKind::CoalOre => mine(1, Item::Coal, TileKind::Stone),
        TileKind::IronOre => mine(2, Item::Iron, TileKind::Stone),
        TileKind::DiamondOre => mine(3, Item::Diamond, TileKind::Stone),
        TileKind::SapphireOre => mine(4, Item::Sapphire, TileKind::Stone),
        TileKind::RubyOre => mine(4, Item::Ruby, TileKind::Stone),
        TileKind::Grass => {
            if rng.chance(0.1) {
                Some((Item::Sapling, TileKind::Grass))
            } else {
                None
            }
        }
        TileKind::Water | TileKind::Fountain => {
            if capability_check(spec, Capability::DrinkSource) {
                let cap = a.meter_cap(&cfg.survival);
                let ag = &mut state.agents[i];
                if ag.water < cap {
                    ag.water += 1;
                    events.push(Event::Drink {
                        agent: id,
                        source: tile,
                    });
                }
            }
            None
        }
        TileKind::RipePlant => {
            if capability_check(spec, Capability::HarvestCrop) {
                let cap = a.meter_cap(&cfg.survival);
                let ag = &mut state.agents[i];
                ag.food = (ag.food + 4).min(cap);
                state.floors[f as usize].set(c, TileKind::Sapling);
                state.plants.retain(|p| !(p.floor == f && p.pos == c));
                state.plants.push(Plant {
                    floor: f,
                    pos: c,
                    age: 0,
                });
                events.push(Event::Eat {
                    agent: id,
                    food: FoodSource::Plant,
                });
            }
            None
        }
        _ => None,
    };
    if let Some((item, after)) = harvest {
        let inv = &mut state.agents[i].inventory;
        if inv.room_for(item, 1) {
            inv.add(item, 1);
            state.floors[f as usize].set(c, after);
            events.push(Event::Harvest {
                agent: id,
                item,
                floor: f,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{AgentState, Specialization};
    use crate::config::SurvivalConfig;
    use crate::scoring::AchievementLedger;
    use crate::world::{Direction, FloorMap, Mob};

    fn world(specs: &[Specialization]) -> WorldState {
        let surv = SurvivalConfig::default();
        WorldState {
            floors: vec![
                FloorMap::filled(12, 12, 0, TileKind::Grass),
                FloorMap::filled(12, 12, 1, TileKind::Path),
            ],
            mobs: Vec::new(),
            agents: specs
                .iter()
                .enumerate()
                .map(|(i, &s)| AgentState::spawn(i as u8, s, Pos::new(2 + 2 * i as i16, 5), &surv))
                .collect(),
            requests: Vec::new(),
            plants: Vec::new(),
            ledger: AchievementLedger::new(specs.len()),
            time: 0,
            rng: RngState::new(0),
        }
    }

    fn run(s: &mut WorldState, cfg: &EnvConfig, acts: &[Action]) -> Vec<Event> {
        let mut ev = Vec::new();
        let mut rng = RngState::new(77);
        resolve_actions(s, acts, cfg, &mut rng, &mut ev);
        ev
    }

    const COOP: [Specialization; 3] = Specialization::COOP_ORDER;

    #[test]
    fn contested_cell_rejects_both() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        // Agents at x=2 and x=4 both step into x=3.
        run(
            &mut s,
            &cfg,
            &[
                Action::Move(Direction::East),
                Action::Move(Direction::West),
                Action::Noop,
            ],
        );
        assert_eq!(s.agents[0].pos, Pos::new(2, 5));
        assert_eq!(s.agents[1].pos, Pos::new(4, 5));
        assert_eq!(s.agents[0].facing, Direction::East);
    }

    #[test]
    fn follower_moves_into_vacated_cell() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[1].pos = Pos::new(3, 5);
        run(
            &mut s,
            &cfg,
            &[
                Action::Move(Direction::East),
                Action::Move(Direction::East),
                Action::Noop,
            ],
        );
        assert_eq!(s.agents[0].pos, Pos::new(3, 5));
        assert_eq!(s.agents[1].pos, Pos::new(4, 5));
    }

    #[test]
    fn blocked_chain_rejects_all() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[1].pos = Pos::new(3, 5);
        s.agents[2].pos = Pos::new(4, 5);
        run(
            &mut s,
            &cfg,
            &[
                Action::Move(Direction::East),
                Action::Move(Direction::East),
                Action::Noop,
            ],
        );
        assert_eq!(s.agents[0].pos, Pos::new(2, 5));
        assert_eq!(s.agents[1].pos, Pos::new(3, 5));
    }

    #[test]
    fn head_on_swap_rejected() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[1].pos = Pos::new(3, 5);
        run(
            &mut s,
            &cfg,
            &[
                Action::Move(Direction::East),
                Action::Move(Direction::West),
                Action::Noop,
            ],
        );
        assert_eq!(s.agents[0].pos, Pos::new(2, 5));
        assert_eq!(s.agents[1].pos, Pos::new(3, 5));
    }

    #[test]
    fn cannot_walk_into_tree_or_mob() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.floors[0].set(Pos::new(2, 4), TileKind::Tree);
        s.mobs.push(Mob {
            kind: MobKind::Cow,
            floor: 0,
            pos: Pos::new(4, 4),
            health: 3,
            cooldown: 0,
        });
        run(
            &mut s,
            &cfg,
            &[
                Action::Move(Direction::North),
                Action::Move(Direction::North),
                Action::Noop,
            ],
        );
        assert_eq!(s.agents[0].pos, Pos::new(2, 5));
        assert_eq!(s.agents[1].pos, Pos::new(4, 5));
    }

    #[test]
    fn lava_kills() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.floors[0].set(Pos::new(2, 6), TileKind::Lava);
        let ev = run(
            &mut s,
            &cfg,
            &[Action::Move(Direction::South), Action::Noop, Action::Noop],
        );
        assert!(!s.agents[0].alive);
        assert!(ev.contains(&Event::AgentDied { agent: 0 }));
    }

    #[test]
    fn tree_gives_wood_and_becomes_grass() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.floors[0].set(Pos::new(2, 6), TileKind::Tree);
        let ev = run(&mut s, &cfg, &[Action::Do, Action::Noop, Action::Noop]);
        assert_eq!(s.agents[0].inventory.get(Item::Wood), 1);
        assert_eq!(s.floors[0].get(Pos::new(2, 6)), TileKind::Grass);
        assert_eq!(
            ev,
            vec![Event::Harvest {
                agent: 0,
                item: Item::Wood,
                floor: 0
            }]
        );
    }

    #[test]
    fn stone_needs_pickaxe() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.floors[0].set(Pos::new(2, 6), TileKind::Stone);
        run(&mut s, &cfg, &[Action::Do, Action::Noop, Action::Noop]);
        assert_eq!(s.agents[0].inventory.get(Item::Stone), 0);
        s.agents[0].inventory.add(Item::WoodPickaxe, 1);
        run(&mut s, &cfg, &[Action::Do, Action::Noop, Action::Noop]);
        assert_eq!(s.agents[0].inventory.get(Item::Stone), 1);
        assert_eq!(s.floors[0].get(Pos::new(2, 6)), TileKind::Path);
    }

    #[test]
    fn only_forager_drinks_in_coop() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        for a in s.agents.iter_mut() {
            a.water = 3;
            s.floors[0].set(Pos::new(a.pos.x, 6), TileKind::Water);
        }
        run(&mut s, &cfg, &[Action::Do, Action::Do, Action::Do]);
        assert_eq!([s.agents[0].water, s.agents[1].water, s.agents[2].water], [3, 4, 3]);
    }

    #[test]
    fn homogeneous_agent_drinks() {
        let cfg = EnvConfig::ma(1);
        let mut s = world(&[Specialization::None]);
        s.agents[0].water = 3;
        s.floors[0].set(Pos::new(2, 6), TileKind::Water);
        run(&mut s, &cfg, &[Action::Do]);
        assert_eq!(s.agents[0].water, 4);
    }

    #[test]
    fn pickaxe_crafting_is_miner_only() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.floors[0].set(Pos::new(4, 3), TileKind::CraftingTable);
        for a in s.agents.iter_mut() {
            a.inventory.add(Item::Wood, 1);
            a.pos.x = 3 + a.id as i16;
        }
        let acts = [Action::MakeWoodPickaxe; 3];
        run(&mut s, &cfg, &acts);
        assert!(s.agents[0].inventory.has(Item::WoodPickaxe, 1));
        assert!(!s.agents[1].inventory.has(Item::WoodPickaxe, 1));
        assert!(!s.agents[2].inventory.has(Item::WoodPickaxe, 1));
        assert_eq!(s.agents[1].inventory.get(Item::Wood), 1);
    }

    #[test]
    fn crafting_requires_nearby_table() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[0].inventory.add(Item::Wood, 1);
        run(&mut s, &cfg, &[Action::MakeWoodSword, Action::Noop, Action::Noop]);
        assert!(!s.agents[0].inventory.has(Item::WoodSword, 1));
        s.floors[0].set(Pos::new(4, 7), TileKind::CraftingTable);
        run(&mut s, &cfg, &[Action::MakeWoodSword, Action::Noop, Action::Noop]);
        assert!(s.agents[0].inventory.has(Item::WoodSword, 1));
    }

    #[test]
    fn melee_damage_scales_with_sword_and_warrior_base() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[2].inventory.add(Item::StoneSword, 1);
        s.agents[2].facing = Direction::North;
        s.mobs.push(Mob {
            kind: MobKind::Zombie,
            floor: 0,
            pos: Pos::new(6, 4),
            health: 5,
            cooldown: 0,
        });
        let ev = run(&mut s, &cfg, &[Action::Noop, Action::Noop, Action::Do]);
        assert_eq!(s.mobs[0].health, 1);
        assert!(ev.contains(&Event::Attack {
            attacker: Actor::Agent(2),
            target: Actor::Mob(0),
            amount: 4
        }));
    }

    #[test]
    fn friendly_fire_hits_teammate() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[1].pos = Pos::new(2, 6);
        let ev = run(&mut s, &cfg, &[Action::Do, Action::Noop, Action::Noop]);
        assert_eq!(s.agents[1].health, 9);
        assert!(ev.contains(&Event::Attack {
            attacker: Actor::Agent(0),
            target: Actor::Agent(1),
            amount: 1
        }));
    }

    #[test]
    fn revive_restores_one_health_and_keeps_inventory() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[1].pos = Pos::new(2, 6);
        s.agents[1].alive = false;
        s.agents[1].health = 0;
        s.agents[1].inventory.add(Item::Coal, 3);
        let ev = run(&mut s, &cfg, &[Action::Do, Action::Noop, Action::Noop]);
        assert!(s.agents[1].alive);
        assert_eq!(s.agents[1].health, 1);
        assert_eq!(s.agents[1].inventory.get(Item::Coal), 3);
        assert_eq!(ev, vec![Event::Revive { reviver: 0, revived: 1 }]);
    }

    #[test]
    fn no_revive_in_ma() {
        let cfg = EnvConfig::ma(2);
        let mut s = world(&[Specialization::None, Specialization::None]);
        s.agents[1].pos = Pos::new(2, 6);
        s.agents[1].alive = false;
        s.agents[1].health = 0;
        run(&mut s, &cfg, &[Action::Do, Action::Noop]);
        assert!(!s.agents[1].alive);
    }

    #[test]
    fn cow_hunting_needs_forager() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.mobs.push(Mob {
            kind: MobKind::Cow,
            floor: 0,
            pos: Pos::new(2, 6),
            health: 1,
            cooldown: 0,
        });
        run(&mut s, &cfg, &[Action::Do, Action::Noop, Action::Noop]);
        assert_eq!(s.mobs[0].health, 1);
        s.agents[1].pos = Pos::new(3, 6);
        s.agents[1].facing = Direction::West;
        s.agents[1].food = 2;
        let ev = run(&mut s, &cfg, &[Action::Noop, Action::Do, Action::Noop]);
        assert_eq!(s.mobs[0].health, 0);
        assert_eq!(s.agents[1].food, 8);
        assert!(ev.contains(&Event::Eat {
            agent: 1,
            food: FoodSource::Cow
        }));
    }

    #[test]
    fn descend_and_ascend_via_ladders() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.floors[0].set(Pos::new(2, 5), TileKind::LadderDown);
        s.floors[0].ladder_down = Some(Pos::new(2, 5));
        s.floors[1].set(Pos::new(6, 6), TileKind::LadderUp);
        s.floors[1].ladder_up = Some(Pos::new(6, 6));
        let ev = run(&mut s, &cfg, &[Action::Descend, Action::Descend, Action::Noop]);
        assert_eq!((s.agents[0].floor, s.agents[0].pos), (1, Pos::new(6, 6)));
        assert_eq!(s.agents[1].floor, 0);
        assert_eq!(s.agents[0].inventory.get(Item::Xp), 1);
        assert!(ev.contains(&Event::EnterFloor { agent: 0, floor: 1 }));
        run(&mut s, &cfg, &[Action::Ascend, Action::Noop, Action::Noop]);
        assert_eq!(s.agents[0].floor, 0);
        assert_eq!(s.agents[0].pos, Pos::new(2, 5));
        run(&mut s, &cfg, &[Action::Descend, Action::Noop, Action::Noop]);
        assert_eq!(s.agents[0].inventory.get(Item::Xp), 1);
    }

    #[test]
    fn place_table_and_torch_lights_dungeon() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        s.agents[0].floor = 1;
        s.agents[0].inventory.add(Item::Torch, 1);
        run(&mut s, &cfg, &[Action::PlaceTorch, Action::Noop, Action::Noop]);
        assert_eq!(s.floors[1].get(Pos::new(2, 6)), TileKind::Torch);
        assert_eq!(s.floors[1].light_at(Pos::new(2, 6), 0.0), 1.0);
        run(&mut s, &cfg, &[Action::PickupTorch, Action::Noop, Action::Noop]);
        assert_eq!(s.agents[0].inventory.get(Item::Torch), 1);
        assert_eq!(s.floors[1].light_at(Pos::new(2, 6), 0.0), 0.0);
    }

    #[test]
    fn arrow_hits_mob_at_range() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        let w = &mut s.agents[2];
        w.inventory.add(Item::Bow, 1);
        w.inventory.add(Item::Arrow, 1);
        w.facing = Direction::North;
        s.mobs.push(Mob {
            kind: MobKind::Zombie,
            floor: 0,
            pos: Pos::new(6, 1),
            health: 4,
            cooldown: 0,
        });
        let ev = run(&mut s, &cfg, &[Action::Noop, Action::Noop, Action::ShootArrow]);
        assert_eq!(s.mobs[0].health, 0);
        assert!(ev.contains(&Event::Kill {
            agent: 2,
            mob: MobKind::Zombie,
            floor: 0,
            ranged: true
        }));
        assert_eq!(s.agents[2].inventory.get(Item::Arrow), 0);
    }

    #[test]
    fn level_up_spends_xp() {
        let cfg = EnvConfig::coop();
        let mut s = world(&COOP);
        run(
            &mut s,
            &cfg,
            &[Action::LevelUp(Attribute::Strength), Action::Noop, Action::Noop],
        );
        assert_eq!(s.agents[0].inventory.get(Item::Strength), 1);
        s.agents[0].inventory.add(Item::Xp, 1);
        let ev = run(
            &mut s,
            &cfg,
            &[Action::LevelUp(Attribute::Strength), Action::Noop, Action::Noop],
        );
        assert_eq!(s.agents[0].inventory.get(Item::Strength), 2);
        assert_eq!(
            ev,
            vec![Event::LevelUp {
                agent: 0,
                attribute: Attribute::Strength,
                value: 2
            }]
        );
    }
}
