//! Per-step world dynamics: time of day, plant growth, mob spawning, mob AI.

use super::gen::{free_cell, mob_tile_ok};
use super::{Direction, FloorMap, Mob, MobKind, Pos, TileKind, WorldState};
use crate::agent::damage;
use crate::config::{SurvivalConfig, WorldGenConfig};
use crate::event::{Actor, Event};
use crate::rng::RngState;

/// Distance within which hostile mobs notice an agent.
const SIGHT: i32 = 8;
/// Minimum distance between a spawning mob and any agent on its floor.
const SPAWN_CLEARANCE: i32 = 4;

/// Overworld light level at `time`: 1 at noon, 0 at midnight.
pub fn daylight(time: u64, day_length: u32) -> f32 {
    let phase = (time % day_length as u64) as f64 / day_length as f64;
    (0.5 + 0.5 * (std::f64::consts::TAU * phase).cos()) as f32
}

/// Population cap of `kind` per floor, scaled by agent count.
#[inline]
pub fn mob_cap(kind: MobKind, n_agents: usize, cfg: &WorldGenConfig) -> u16 {
    cfg.base_mob_cap.get(kind).saturating_mul(n_agents as u16)
}

fn spawn_chance(kind: MobKind, floor: u8, night: bool) -> f32 {
    let depth = 1.0 + 0.25 * floor as f32;
    match (kind, floor) {
        (MobKind::Cow, _) => 0.02,
        (MobKind::Zombie, 0) => {
            if night {
                0.05
            } else {
                0.01
            }
        }
        (MobKind::Zombie, _) | (MobKind::Skeleton, _) => 0.03 * depth,
        (MobKind::Bat, _) => 0.02 * depth,
    }
}

/// Recomputes torch light on a dungeon floor. Each torch lights cells within
/// `radius` (euclidean) with intensity falling linearly from 1 to 0.5.
pub fn recompute_light(floor: &mut FloorMap, radius: u8) {
    if floor.floor_index == 0 {
        return;
    }
    floor.light.iter_mut().for_each(|l| *l = 0.0);
    let r = radius as i16;
    let torches: Vec<Pos> = floor.positions().filter(|&p| floor.get(p) == TileKind::Torch).collect();
    for t in torches {
        for dy in -r..=r {
            for dx in -r..=r {
                let p = Pos::new(t.x + dx, t.y + dy);
                if !floor.in_bounds(p) {
                    continue;
                }
                let d = ((dx as f32).powi(2) + (dy as f32).powi(2)).sqrt();
                if d > radius as f32 {
                    continue;
                }
                let v = 1.0 - 0.5 * d / radius as f32;
                let i = floor.idx(p);
                if v > floor.light[i] {
                    floor.light[i] = v;
                }
            }
        }
    }
}

/// Advances everything that is not directly driven by agent actions.
pub fn step_world(
    state: &mut WorldState,
    cfg: &WorldGenConfig,
    survival: &SurvivalConfig,
    rng: &mut RngState,
    events: &mut Vec<Event>,
) {
    state.time += 1;
    grow_plants(state, survival);

    let mut active = 0u16;
    for a in state.agents.iter().filter(|a| a.alive) {
        active |= 1 << a.floor;
    }
    let night = daylight(state.time, cfg.day_length) < 0.5;
    let n = state.n_agents();

    for f in 0..cfg.n_floors {
        if active & (1 << f) == 0 {
            continue;
        }
        for kind in MobKind::ALL {
            if !kind.lives_on(f) {
                continue;
            }
            let roll = rng.chance(spawn_chance(kind, f, night));
            if !roll || state.mob_count(f, kind) >= mob_cap(kind, n, cfg) as usize {
                continue;
            }
            let spot = {
                let agents = &state.agents;
                free_cell(state, f, rng, 8, |fl, p| {
                    mob_tile_ok(kind, fl.get(p))
                        && agents
                            .iter()
                            .filter(|a| a.floor == f)
                            .all(|a| a.pos.chebyshev(p) >= SPAWN_CLEARANCE)
                })
            };
            if let Some(pos) = spot {
                state.mobs.push(Mob {
                    kind,
                    floor: f,
                    pos,
                    health: kind.max_health(),
                    cooldown: 0,
                });
            }
        }
    }

    for i in 0..state.mobs.len() {
        let m = state.mobs[i];
        if m.health == 0 || active & (1 << m.floor) == 0 {
            continue;
        }
        if m.cooldown > 0 {
            state.mobs[i].cooldown -= 1;
        }
        if m.kind.hostile() {
            hostile_turn(state, i, cfg, rng, events);
        } else {
            let p = if m.kind == MobKind::Bat { 0.8 } else { 0.5 };
            if rng.chance(p) {
                let dir = Direction::ALL[rng.below(4) as usize];
                try_move(state, i, dir);
            }
        }
    }
    state.mobs.retain(|m| m.health > 0);
}

fn grow_plants(state: &mut WorldState, survival: &SurvivalConfig) {
    let ripe = survival.plant_ripen_steps;
    let floors = &mut state.floors;
    state.plants.retain_mut(|p| {
        let fl = &mut floors[p.floor as usize];
        match fl.get(p.pos) {
            TileKind::Sapling => {
                p.age += 1;
                if p.age >= ripe {
                    fl.set(p.pos, TileKind::RipePlant);
                }
                true
            }
            TileKind::RipePlant => true,
            _ => false,
        }
    });
}

fn nearest_agent(state: &WorldState, floor: u8, pos: Pos) -> Option<usize> {
    state
        .agents
        .iter()
        .enumerate()
        .filter(|(_, a)| a.alive && a.floor == floor)
        .map(|(i, a)| (a.pos.manhattan(pos), i))
        .filter(|&(d, _)| d <= SIGHT)
        .min()
        .map(|(_, i)| i)
}

fn hostile_turn(state: &mut WorldState, i: usize, cfg: &WorldGenConfig, rng: &mut RngState, events: &mut Vec<Event>) {
    let m = state.mobs[i];
    let target = nearest_agent(state, m.floor, m.pos);
    let Some(t) = target else {
        if rng.chance(0.3) {
            try_move(state, i, Direction::ALL[rng.below(4) as usize]);
        }
        return;
    };
    let tp = state.agents[t].pos;
    let dist = tp.manhattan(m.pos);
    match m.kind {
        MobKind::Zombie => {
            if dist == 1 {
                if state.mobs[i].cooldown == 0 {
                    damage(
                        state,
                        Actor::Mob(i as u16),
                        Actor::Agent(t as u8),
                        cfg.zombie_damage,
                        false,
                        events,
                    );
                    state.mobs[i].cooldown = cfg.mob_cooldown;
                }
            } else if rng.chance(0.8) {
                chase(state, i, tp);
            } else {
                try_move(state, i, Direction::ALL[rng.below(4) as usize]);
            }
        }
        _ => {
            if state.mobs[i].cooldown == 0 && line_of_fire(state, m.floor, m.pos, tp, cfg.skeleton_range) {
                damage(
                    state,
                    Actor::Mob(i as u16),
                    Actor::Agent(t as u8),
                    cfg.skeleton_damage,
                    true,
                    events,
                );
                state.mobs[i].cooldown = cfg.mob_cooldown;
            } else if dist > 3 && rng.chance(0.6) {
                chase(state, i, tp);
            } else if rng.chance(0.3) {
                try_move(state, i, Direction::ALL[rng.below(4) as usize]);
            }
        }
    }
}

/// Same row or column, within `range`, with no blocking tile in between.
pub(crate) fn line_of_fire(state: &WorldState, floor: u8, from: Pos, to: Pos, range: u8) -> bool {
    if from.x != to.x && from.y != to.y {
        return false;
    }
    let d = from.manhattan(to);
    if d == 0 || d > range as i32 {
        return false;
    }
    let fl = &state.floors[floor as usize];
    let step = Pos::new((to.x - from.x).signum(), (to.y - from.y).signum());
    let mut p = from;
    for _ in 1..d {
        p = Pos::new(p.x + step.x, p.y + step.y);
        if !fl.get(p).walkable() {
            return false;
        }
    }
    true
}

fn chase(state: &mut WorldState, i: usize, target: Pos) {
    let p = state.mobs[i].pos;
    let dx = target.x - p.x;
    let dy = target.y - p.y;
    let horiz = if dx > 0 { Direction::East } else { Direction::West };
    let vert = if dy > 0 { Direction::South } else { Direction::North };
    let (first, second) = if dx.abs() >= dy.abs() {
        (horiz, vert)
    } else {
        (vert, horiz)
    };
    if !try_move(state, i, first) && (if first == horiz { dy } else { dx }) != 0 {
        try_move(state, i, second);
    }
}

fn try_move(state: &mut WorldState, i: usize, dir: Direction) -> bool {
    let m = state.mobs[i];
    let to = m.pos.step(dir);
    let fl = &state.floors[m.floor as usize];
    let t = fl.get(to);
    let ok = match m.kind {
        MobKind::Cow => matches!(t, TileKind::Grass | TileKind::Sand | TileKind::Path),
        _ => t.safe() && !matches!(t, TileKind::LadderDown | TileKind::LadderUp),
    };
    if ok && !state.occupied(m.floor, to) {
        state.mobs[i].pos = to;
        true
    } else {
        false
    }
}
