//! Egocentric symbolic observations and the layout manifest describing them.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::agent::{AgentState, Item, Specialization};
use crate::config::{EnvConfig, Variant};
use crate::coop::{open_request_of, TradableResource};
use crate::world::{daylight, MobKind, Pos, TileKind, WorldState};

/// Cells on floors >= 1 below this light level are masked as dark.
pub const DARKNESS_THRESHOLD: f32 = 0.3;
/// Channels of the tile map: every tile kind plus the darkness code.
pub const TILE_CHANNELS: usize = TileKind::COUNT + 1;
/// ladder_down, ladder_up, light.
pub const ITEM_CHANNELS: usize = 3;
/// Eight compass bearings, then none / below / above.
pub const DIRECTION_CHANNELS: usize = 11;
pub const DIR_NONE: usize = 8;
pub const DIR_BELOW: usize = 9;
pub const DIR_ABOVE: usize = 10;
pub const COMPASS: [&str; 8] = ["n", "ne", "e", "se", "s", "sw", "w", "nw"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slice {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    /// Logical shape, row-major; `[len]` for flat slices.
    pub shape: Vec<usize>,
}

impl Slice {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len
    }
}

/// Ordered description of every slice of the observation vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObsLayout {
    pub variant: Variant,
    pub n_agents: usize,
    /// (height, width) in cells.
    pub window: (usize, usize),
    pub n_floors: usize,
    pub slices: Vec<Slice>,
    pub total: usize,
    pub tile_channels: Vec<String>,
    pub mob_channels: Vec<String>,
    pub item_channels: Vec<String>,
    pub direction_channels: Vec<String>,
    pub request_channels: Vec<String>,
    /// Normalization divisor for every inventory entry, in slice order.
    pub inventory_caps: Vec<(String, u8)>,
    pub darkness_threshold: f32,
}

struct Builder {
    slices: Vec<Slice>,
    offset: usize,
}

impl Builder {
    fn push(&mut self, name: impl Into<String>, shape: &[usize]) {
        let len = shape.iter().product();
        self.slices.push(Slice {
            name: name.into(),
            offset: self.offset,
            len,
            shape: shape.to_vec(),
        });
        self.offset += len;
    }
}

impl ObsLayout {
    pub fn new(cfg: &EnvConfig) -> Self {
        let (h, w) = (cfg.obs_window.0 as usize, cfg.obs_window.1 as usize);
        let coop = cfg.variant == Variant::Coop;
        let n_floors = cfg.worldgen.n_floors as usize;
        let mut b = Builder {
            slices: Vec::new(),
            offset: 0,
        };
        b.push("map.tiles", &[h, w, TILE_CHANNELS]);
        b.push("map.mobs", &[h, w, MobKind::COUNT]);
        b.push("map.items", &[h, w, ITEM_CHANNELS]);
        b.push("inventory", &[Item::COUNT]);
        b.push("meters", &[4]);
        if coop {
            b.push("specialization", &[3]);
        }
        b.push("facing", &[4]);
        b.push("floor", &[n_floors]);
        b.push("light", &[1]);
        b.push("sleeping", &[1]);
        for k in 0..cfg.n_agents.saturating_sub(1) {
            b.push(format!("teammate{k}.position"), &[h, w]);
            b.push(format!("teammate{k}.health"), &[1]);
            if coop {
                b.push(format!("teammate{k}.specialization"), &[3]);
            }
            b.push(format!("teammate{k}.direction"), &[DIRECTION_CHANNELS]);
            if coop {
                b.push(format!("teammate{k}.request"), &[TradableResource::ALL.len() + 1]);
            }
            b.push(format!("teammate{k}.alive"), &[1]);
        }
        let mut tile_channels: Vec<String> = TileKind::ALL.iter().map(|t| t.name().to_string()).collect();
        tile_channels.push("darkness".into());
        let mut request_channels: Vec<String> = TradableResource::ALL.iter().map(|r| r.name().to_string()).collect();
        request_channels.push("none".into());
        let mut direction_channels: Vec<String> = COMPASS.iter().map(|s| s.to_string()).collect();
        direction_channels.extend(["none", "below", "above"].map(String::from));
        Self {
            variant: cfg.variant,
            n_agents: cfg.n_agents,
            window: (h, w),
            n_floors,
            total: b.offset,
            slices: b.slices,
            tile_channels,
            mob_channels: MobKind::ALL.iter().map(|m| m.name().to_string()).collect(),
            item_channels: ["ladder_down", "ladder_up", "light"].map(String::from).to_vec(),
            direction_channels,
            request_channels,
            inventory_caps: Item::ALL.iter().map(|i| (i.name().to_string(), i.cap())).collect(),
            darkness_threshold: DARKNESS_THRESHOLD,
        }
    }

    pub fn slice(&self, name: &str) -> Option<&Slice> {
        self.slices.iter().find(|s| s.name == name)
    }

    pub fn range(&self, name: &str) -> Option<Range<usize>> {
        self.slice(name).map(Slice::range)
    }

    /// Teammate slots seen by `agent`, ordered by id, skipping self.
    pub fn teammates(&self, agent: usize) -> impl Iterator<Item = usize> {
        (0..self.n_agents).filter(move |&j| j != agent)
    }
}

/// Bearing from `from` to `to` as a compass index (0 = north, clockwise).
/// `y` grows southwards. Sectors are 45 degrees wide; the 22.5 degree
/// boundary uses tan(67.5) ~= 12/5.
pub fn compass_sector(from: Pos, to: Pos) -> usize {
    let dx = to.x as i32 - from.x as i32;
    let dy = to.y as i32 - from.y as i32;
    let (ax, ay) = (dx.abs(), dy.abs());
    if 5 * ay > 12 * ax {
        if dy < 0 {
            0
        } else {
            4
        }
    } else if 5 * ax > 12 * ay {
        if dx > 0 {
            2
        } else {
            6
        }
    } else {
        match (dx > 0, dy < 0) {
            (true, true) => 1,
            (true, false) => 3,
            (false, false) => 5,
            (false, true) => 7,
        }
    }
}

/// Off-screen direction channel for teammate `t` as seen by `me`.
pub fn teammate_direction(me: &AgentState, t: &AgentState, window: (usize, usize)) -> usize {
    if t.floor > me.floor {
        DIR_BELOW
    } else if t.floor < me.floor {
        DIR_ABOVE
    } else if in_window(me.pos, t.pos, window).is_some() {
        DIR_NONE
    } else {
        compass_sector(me.pos, t.pos)
    }
}

/// Window cell (row, col) of `p` for a window centred on `centre`.
#[inline]
pub fn in_window(centre: Pos, p: Pos, window: (usize, usize)) -> Option<(usize, usize)> {
    let (h, w) = (window.0 as i32, window.1 as i32);
    let r = p.y as i32 - centre.y as i32 + h / 2;
    let c = p.x as i32 - centre.x as i32 + w / 2;
    (r >= 0 && c >= 0 && r < h && c < w).then_some((r as usize, c as usize))
}

/// Writes agent `agent`'s observation into `out` (length `layout.total`).
pub fn encode_observation_into(state: &WorldState, agent: usize, layout: &ObsLayout, cfg: &EnvConfig, out: &mut [f32]) {
    debug_assert_eq!(out.len(), layout.total);
    out.fill(0.0);
    let me = &state.agents[agent];
    let fl = &state.floors[me.floor as usize];
    let (h, w) = layout.window;
    let day = daylight(state.time, cfg.worldgen.day_length);
    let dark_floor = me.floor > 0;
    let mut off = 0;

    let tiles = off;
    let mobs = tiles + h * w * TILE_CHANNELS;
    let items = mobs + h * w * MobKind::COUNT;
    off = items + h * w * ITEM_CHANNELS;
    let (cy, cx) = ((h / 2) as i16, (w / 2) as i16);
    for r in 0..h {
        for c in 0..w {
            let p = Pos::new(me.pos.x + c as i16 - cx, me.pos.y + r as i16 - cy);
            let cell = r * w + c;
            let t = fl.get(p);
            let light = fl.light_at(p, day);
            if dark_floor && t != TileKind::OutOfBounds && light < DARKNESS_THRESHOLD {
                out[tiles + cell * TILE_CHANNELS + TileKind::COUNT] = 1.0;
                continue;
            }
            out[tiles + cell * TILE_CHANNELS + t.index()] = 1.0;
            let it = items + cell * ITEM_CHANNELS;
            if t == TileKind::LadderDown {
                out[it] = 1.0;
            } else if t == TileKind::LadderUp {
                out[it + 1] = 1.0;
            }
            out[it + 2] = light;
        }
    }
    for m in &state.mobs {
        if m.floor != me.floor || m.health == 0 {
            continue;
        }
        if let Some((r, c)) = in_window(me.pos, m.pos, layout.window) {
            let cell = r * w + c;
            if out[tiles + cell * TILE_CHANNELS + TileKind::COUNT] == 0.0 {
                out[mobs + cell * MobKind::COUNT + m.kind.index()] = 1.0;
            }
        }
    }

    for &item in Item::ALL {
        out[off + item.index()] = me.inventory.get(item) as f32 / item.cap() as f32;
    }
    off += Item::COUNT;

    let s = &cfg.survival;
    let cap = me.meter_cap(s) as f32;
    out[off] = me.health as f32 / s.max_health as f32;
    out[off + 1] = me.food as f32 / cap;
    out[off + 2] = me.water as f32 / cap;
    out[off + 3] = me.energy as f32 / s.max_energy as f32;
    off += 4;

    let coop = layout.variant == Variant::Coop;
    if coop {
        if let Some(k) = me.specialization.one_hot_index() {
            out[off + k] = 1.0;
        }
        off += 3;
    }
    out[off + me.facing.index()] = 1.0;
    off += 4;
    out[off + me.floor as usize] = 1.0;
    off += layout.n_floors;
    out[off] = fl.light_at(me.pos, day);
    off += 1;
    out[off] = me.sleeping as u8 as f32;
    off += 1;

    for j in layout.teammates(agent) {
        let t = &state.agents[j];
        if t.floor == me.floor {
            if let Some((r, c)) = in_window(me.pos, t.pos, layout.window) {
                out[off + r * w + c] = 1.0;
            }
        }
        off += h * w;
        out[off] = t.health as f32 / s.max_health as f32;
        off += 1;
        if coop {
            if let Some(k) = t.specialization.one_hot_index() {
                out[off + k] = 1.0;
            }
            off += 3;
        }
        out[off + teammate_direction(me, t, layout.window)] = 1.0;
        off += DIRECTION_CHANNELS;
        if coop {
            let k = open_request_of(state, j as u8)
                .map(|r| r.resource.index())
                .unwrap_or(TradableResource::ALL.len());
            out[off + k] = 1.0;
            off += TradableResource::ALL.len() + 1;
        }
        out[off] = t.alive as u8 as f32;
        off += 1;
    }
    debug_assert_eq!(off, layout.total);
}

pub fn encode_observation(state: &WorldState, agent: usize, layout: &ObsLayout, cfg: &EnvConfig) -> Vec<f32> {
    let mut v = vec![0.0; layout.total];
    encode_observation_into(state, agent, layout, cfg, &mut v);
    v
}

/// Specialization for a one-hot slice, the inverse of `one_hot_index`.
pub fn specialization_from_one_hot(v: &[f32]) -> Specialization {
    match v.iter().position(|&x| x > 0.5) {
        Some(0) => Specialization::Miner,
        Some(1) => Specialization::Forager,
        Some(2) => Specialization::Warrior,
        _ => Specialization::None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_is_total_and_unique() {
        for cfg in [EnvConfig::coop(), EnvConfig::ma(4), EnvConfig::ma(1)] {
            let l = ObsLayout::new(&cfg);
            let sum: usize = l.slices.iter().map(|s| s.len).sum();
            assert_eq!(sum, l.total);
            let mut names: Vec<_> = l.slices.iter().map(|s| s.name.clone()).collect();
            names.sort();
            names.dedup();
            assert_eq!(names.len(), l.slices.len());
            let mut at = 0;
            for s in &l.slices {
                assert_eq!(s.offset, at);
                at += s.len;
            }
        }
    }

    #[test]
    fn coop_layout_longer_than_ma() {
        let coop = ObsLayout::new(&EnvConfig::coop());
        let ma = ObsLayout::new(&EnvConfig::ma(3));
        assert!(coop.total > ma.total);
        assert!(ma.slice("specialization").is_none());
        assert!(ma.slice("teammate0.request").is_none());
        assert!(coop.slice("teammate1.request").is_some());
    }

    #[test]
    fn default_window_is_9_by_11() {
        let l = ObsLayout::new(&EnvConfig::coop());
        assert_eq!(l.slice("map.tiles").unwrap().shape, vec![9, 11, TILE_CHANNELS]);
    }

    #[test]
    fn compass_sectors() {
        let o = Pos::new(0, 0);
        assert_eq!(compass_sector(o, Pos::new(0, -10)), 0);
        assert_eq!(compass_sector(o, Pos::new(10, -10)), 1);
        assert_eq!(compass_sector(o, Pos::new(10, 1)), 2);
        assert_eq!(compass_sector(o, Pos::new(7, 7)), 3);
        assert_eq!(compass_sector(o, Pos::new(1, 9)), 4);
        assert_eq!(compass_sector(o, Pos::new(-6, 6)), 5);
        assert_eq!(compass_sector(o, Pos::new(-9, 0)), 6);
        assert_eq!(compass_sector(o, Pos::new(-3, -3)), 7);
    }

    #[test]
    fn window_geometry() {
        let c = Pos::new(10, 10);
        assert_eq!(in_window(c, c, (9, 11)), Some((4, 5)));
        assert_eq!(in_window(c, Pos::new(5, 6), (9, 11)), Some((0, 0)));
        assert_eq!(in_window(c, Pos::new(15, 14), (9, 11)), Some((8, 10)));
        assert_eq!(in_window(c, Pos::new(16, 10), (9, 11)), None);
        assert_eq!(in_window(c, Pos::new(10, 15), (9, 11)), None);
    }
}
