//! Procedural generation: value-noise overworld, random-walk caverns below.

use std::collections::VecDeque;

use super::{mob_cap, FloorMap, Mob, MobKind, Pos, TileKind, WorldState};
use crate::agent::{AgentState, Specialization};
use crate::config::{SurvivalConfig, WorldGenConfig};
use crate::error::{Error, Result};
use crate::rng::{tags, RngState};
use crate::scoring::AchievementLedger;

/// Minimum Chebyshev distance between a freshly placed mob and the spawn
/// centre (overworld) or the arrival ladder (dungeons).
const MOB_CLEARANCE: i32 = 6;

/// Generates every floor, spawns `n_agents` homogeneous agents on the
/// overworld and seeds mob populations up to their caps.
pub fn generate_world(
    seed: u64,
    cfg: &WorldGenConfig,
    survival: &SurvivalConfig,
    n_agents: usize,
) -> Result<WorldState> {
    cfg.validate()?;
    if n_agents == 0 {
        return Err(Error::InvalidConfig("n_agents must be >= 1".into()));
    }
    let root = RngState::new(seed);
    let gen = root.split(tags::WORLDGEN);

    let mut floors = Vec::with_capacity(cfg.n_floors as usize);
    let mut over = gen.split(0);
    floors.push(overworld(cfg, &mut over));
    for f in 1..cfg.n_floors {
        let mut r = gen.split(f as u64);
        floors.push(cavern(cfg, f, &mut r));
    }

    let mut spawn_rng = gen.split(0x5a5a);
    let agents = spawn_agents(&floors[0], cfg, survival, n_agents, &mut spawn_rng)?;

    let mut state = WorldState {
        floors,
        mobs: Vec::new(),
        agents,
        requests: Vec::new(),
        plants: Vec::new(),
        ledger: AchievementLedger::new(n_agents),
        time: 0,
        rng: root.split(tags::EPISODE),
    };

    let mut mob_rng = gen.split(0xb0b);
    for f in 0..cfg.n_floors {
        let anchor = if f == 0 {
            centre(&state.floors[0])
        } else {
            state.floors[f as usize]
                .ladder_up
                .unwrap_or_else(|| centre(&state.floors[f as usize]))
        };
        for kind in MobKind::ALL {
            if !kind.lives_on(f) {
                continue;
            }
            let cap = mob_cap(kind, n_agents, cfg);
            for _ in 0..cap {
                if let Some(p) = free_cell(&state, f, &mut mob_rng, 64, |fl, p| {
                    p.chebyshev(anchor) >= MOB_CLEARANCE && mob_tile_ok(kind, fl.get(p))
                }) {
                    state.mobs.push(Mob {
                        kind,
                        floor: f,
                        pos: p,
                        health: kind.max_health(),
                        cooldown: 0,
                    });
                }
            }
        }
    }
    Ok(state)
}

pub(crate) fn centre(floor: &FloorMap) -> Pos {
    Pos::new(floor.width as i16 / 2, floor.height as i16 / 2)
}

/// Tiles a mob of `kind` may be spawned onto.
pub(crate) fn mob_tile_ok(kind: MobKind, t: TileKind) -> bool {
    match kind {
        MobKind::Cow => t == TileKind::Grass,
        _ => t.safe() && !matches!(t, TileKind::LadderDown | TileKind::LadderUp),
    }
}

/// Random unoccupied safe cell on `floor` satisfying `pred`, within `tries`.
pub(crate) fn free_cell(
    state: &WorldState,
    floor: u8,
    rng: &mut RngState,
    tries: u32,
    pred: impl Fn(&FloorMap, Pos) -> bool,
) -> Option<Pos> {
    let fl = &state.floors[floor as usize];
    for _ in 0..tries {
        let p = Pos::new(rng.below(fl.width as u32) as i16, rng.below(fl.height as u32) as i16);
        if fl.get(p).safe() && pred(fl, p) && !state.occupied(floor, p) {
            return Some(p);
        }
    }
    None
}

fn spawn_agents(
    over: &FloorMap,
    cfg: &WorldGenConfig,
    survival: &SurvivalConfig,
    n_agents: usize,
    rng: &mut RngState,
) -> Result<Vec<AgentState>> {
    let c = centre(over);
    let r = cfg.spawn_radius as i16;
    let mut cells: Vec<Pos> = Vec::new();
    for y in c.y - r..=c.y + r {
        for x in c.x - r..=c.x + r {
            let p = Pos::new(x, y);
            if over.get(p).safe() {
                cells.push(p);
            }
        }
    }
    if cells.len() < n_agents {
        return Err(Error::InvalidConfig(format!(
            "spawn region hosts {} walkable cells, {} agents requested",
            cells.len(),
            n_agents
        )));
    }
    // Partial Fisher-Yates: the first n entries become the spawn cells.
    for i in 0..n_agents {
        let j = i + rng.below((cells.len() - i) as u32) as usize;
        cells.swap(i, j);
    }
    Ok(cells[..n_agents]
        .iter()
        .enumerate()
        .map(|(i, &p)| AgentState::spawn(i as u8, Specialization::None, p, survival))
        .collect())
}

/// Bilinear value noise in `[0, 1]` with lattice spacing `cell`.
fn value_noise(w: usize, h: usize, cell: usize, rng: &mut RngState) -> Vec<f32> {
    let gw = w / cell + 2;
    let gh = h / cell + 2;
    let lattice: Vec<f32> = (0..gw * gh).map(|_| rng.unit()).collect();
    let smooth = |t: f32| t * t * (3.0 - 2.0 * t);
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let gy = y / cell;
        let ty = smooth((y % cell) as f32 / cell as f32);
        for x in 0..w {
            let gx = x / cell;
            let tx = smooth((x % cell) as f32 / cell as f32);
            let a = lattice[gy * gw + gx];
            let b = lattice[gy * gw + gx + 1];
            let c = lattice[(gy + 1) * gw + gx];
            let d = lattice[(gy + 1) * gw + gx + 1];
            let top = a + (b - a) * tx;
            let bot = c + (d - c) * tx;
            out[y * w + x] = top + (bot - top) * ty;
        }
    }
    out
}

fn overworld(cfg: &WorldGenConfig, rng: &mut RngState) -> FloorMap {
    let (w, h) = (cfg.floor_width as usize, cfg.floor_height as usize);
    let mut fl = FloorMap::filled(cfg.floor_width, cfg.floor_height, 0, TileKind::Grass);
    let coarse = value_noise(w, h, 12, rng);
    let fine = value_noise(w, h, 5, rng);
    let mountain = value_noise(w, h, 9, rng);
    let forest = value_noise(w, h, 6, rng);
    let d = cfg.ore_density;
    let c = centre(&fl);
    let keep_clear = cfg.spawn_radius as i32 + 1;

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let p = Pos::new(x as i16, y as i16);
            if p.chebyshev(c) <= keep_clear {
                continue;
            }
            let elev = 0.65 * coarse[i] + 0.35 * fine[i];
            let m = mountain[i];
            let t = if elev < 0.3 {
                TileKind::Water
            } else if elev < 0.36 {
                TileKind::Sand
            } else if m > 0.62 {
                if m < 0.645 && rng.chance(0.5) {
                    TileKind::Path
                } else if m > 0.74 && rng.chance(d.diamond) {
                    TileKind::DiamondOre
                } else if m > 0.68 && rng.chance(d.iron) {
                    TileKind::IronOre
                } else if rng.chance(d.coal) {
                    TileKind::CoalOre
                } else {
                    TileKind::Stone
                }
            } else if rng.chance(d.tree * (0.4 + 1.6 * forest[i])) {
                TileKind::Tree
            } else {
                TileKind::Grass
            };
            fl.tiles[i] = t;
        }
    }

    // Everything the agents need early on must be reachable from spawn.
    for needed in [TileKind::Water, TileKind::Tree, TileKind::Stone] {
        let reach = reachable_from(&fl, c);
        let touches = fl.positions().any(|p| {
            fl.get(p) == needed
                && crate::world::Direction::ALL.iter().any(|&dir| {
                    let q = p.step(dir);
                    fl.in_bounds(q) && reach[fl.idx(q)]
                })
        });
        if !touches {
            let spots: Vec<Pos> = fl
                .positions()
                .filter(|&p| reach[fl.idx(p)] && p.chebyshev(c) > keep_clear + 2)
                .collect();
            if !spots.is_empty() {
                let p = spots[rng.below(spots.len() as u32) as usize];
                fl.set(p, needed);
            }
        }
    }

    let reach = reachable_from(&fl, c);
    place_ladder(&mut fl, c, &reach, TileKind::LadderDown, rng);
    fl
}

fn cavern(cfg: &WorldGenConfig, floor: u8, rng: &mut RngState) -> FloorMap {
    let (w, h) = (cfg.floor_width as i16, cfg.floor_height as i16);
    let mut fl = FloorMap::filled(cfg.floor_width, cfg.floor_height, floor, TileKind::Stone);
    let open = if floor >= 3 {
        TileKind::DarkFloor
    } else {
        TileKind::Path
    };
    let target = (w as usize * h as usize) * 36 / 100;

    let start = Pos::new(
        w / 4 + rng.below((w / 2) as u32) as i16,
        h / 4 + rng.below((h / 2) as u32) as i16,
    );
    let mut p = start;
    let mut carved = 0usize;
    let mut steps = 0u32;
    let carve = |fl: &mut FloorMap, q: Pos, carved: &mut usize| {
        if q.x >= 1 && q.y >= 1 && q.x < w - 1 && q.y < h - 1 && fl.get(q) == TileKind::Stone {
            fl.set(q, open);
            *carved += 1;
        }
    };
    carve(&mut fl, p, &mut carved);
    while carved < target && steps < 200_000 {
        steps += 1;
        let dir = crate::world::Direction::ALL[rng.below(4) as usize];
        let q = p.step(dir);
        if q.x < 1 || q.y < 1 || q.x >= w - 1 || q.y >= h - 1 {
            continue;
        }
        p = q;
        carve(&mut fl, p, &mut carved);
        if steps.is_multiple_of(60) {
            let rw = 1 + rng.below(2) as i16;
            let rh = 1 + rng.below(2) as i16;
            for dy in -rh..=rh {
                for dx in -rw..=rw {
                    carve(&mut fl, Pos::new(p.x + dx, p.y + dy), &mut carved);
                }
            }
        }
    }

    let d = cfg.ore_density;
    let depth = 1.0 + 0.15 * floor as f32;
    for i in 0..fl.tiles.len() {
        let t = fl.tiles[i];
        if t == TileKind::Stone {
            fl.tiles[i] = if floor >= 3 && rng.chance(d.sapphire * depth) {
                TileKind::SapphireOre
            } else if floor >= 3 && rng.chance(d.ruby * depth) {
                TileKind::RubyOre
            } else if floor >= 2 && rng.chance(d.diamond * depth) {
                TileKind::DiamondOre
            } else if rng.chance(d.iron * depth) {
                TileKind::IronOre
            } else if rng.chance(d.coal) {
                TileKind::CoalOre
            } else {
                TileKind::Stone
            };
        } else if t == open && Pos::new((i % w as usize) as i16, (i / w as usize) as i16).chebyshev(start) > 2 {
            fl.tiles[i] = if rng.chance(d.fountain) {
                TileKind::Fountain
            } else if rng.chance(d.water_pool) {
                TileKind::Water
            } else if floor >= 5 && rng.chance(d.lava) {
                TileKind::Lava
            } else {
                open
            };
        }
    }

    fl.set(start, TileKind::LadderUp);
    fl.ladder_up = Some(start);
    if floor + 1 < cfg.n_floors {
        let reach = reachable_from(&fl, start);
        place_ladder(&mut fl, start, &reach, TileKind::LadderDown, rng);
    }
    fl
}

/// Puts a ladder on a reachable cell, preferring ones at least 10 cells away.
fn place_ladder(fl: &mut FloorMap, from: Pos, reach: &[bool], tile: TileKind, rng: &mut RngState) {
    let reachable: Vec<Pos> = fl
        .positions()
        .filter(|&p| reach[fl.idx(p)] && p != from && fl.get(p) != TileKind::LadderUp)
        .collect();
    let far: Vec<Pos> = reachable.iter().copied().filter(|&p| p.manhattan(from) >= 10).collect();
    let spot = if !far.is_empty() {
        far[rng.below(far.len() as u32) as usize]
    } else if let Some(&p) = reachable.iter().max_by_key(|p| p.manhattan(from)) {
        p
    } else {
        // Degenerate map: dig the cell next to the start.
        Pos::new((from.x + 1).min(fl.width as i16 - 2), from.y)
    };
    fl.set(spot, tile);
    match tile {
        TileKind::LadderDown => fl.ladder_down = Some(spot),
        _ => fl.ladder_up = Some(spot),
    }
}

/// 4-connected flood fill over safe cells.
pub fn reachable_from(fl: &FloorMap, start: Pos) -> Vec<bool> {
    let mut seen = vec![false; fl.tiles.len()];
    if !fl.in_bounds(start) {
        return seen;
    }
    let mut q = VecDeque::new();
    seen[fl.idx(start)] = true;
    q.push_back(start);
    while let Some(p) = q.pop_front() {
        for dir in crate::world::Direction::ALL {
            let n = p.step(dir);
            if fl.in_bounds(n) && !seen[fl.idx(n)] && fl.get(n).safe() {
                seen[fl.idx(n)] = true;
                q.push_back(n);
            }
        }
    }
    seen
}
