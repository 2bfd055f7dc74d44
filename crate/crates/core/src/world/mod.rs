//! Multi-floor grid world: terrain, mobs, light and the full simulation state.

mod gen;
mod step;

pub use gen::{generate_world, reachable_from};
pub use step::{daylight, mob_cap, recompute_light, step_world};

use serde::{Deserialize, Serialize};
use std::hash::{Hash, Hasher};

use crate::agent::AgentState;
use crate::coop::TradeRequest;
use crate::rng::RngState;
use crate::scoring::AchievementLedger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct Pos {
    pub x: i16,
    pub y: i16,
}

impl Pos {
    pub const fn new(x: i16, y: i16) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn step(self, dir: Direction) -> Pos {
        let (dx, dy) = dir.delta();
        Pos::new(self.x + dx, self.y + dy)
    }

    #[inline]
    pub fn manhattan(self, other: Pos) -> i32 {
        (self.x as i32 - other.x as i32).abs() + (self.y as i32 - other.y as i32).abs()
    }

    #[inline]
    pub fn chebyshev(self, other: Pos) -> i32 {
        (self.x as i32 - other.x as i32)
            .abs()
            .max((self.y as i32 - other.y as i32).abs())
    }
}

/// Facing / movement direction. `y` grows downwards (south).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Direction {
    North,
    #[default]
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::North, Direction::South, Direction::East, Direction::West];

    #[inline]
    pub const fn delta(self) -> (i16, i16) {
        match self {
            Direction::North => (0, -1),
            Direction::South => (0, 1),
            Direction::East => (1, 0),
            Direction::West => (-1, 0),
        }
    }

    pub const fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[repr(u8)]
pub enum TileKind {
    OutOfBounds,
    Grass,
    Water,
    Sand,
    Stone,
    Path,
    Tree,
    CoalOre,
    IronOre,
    DiamondOre,
    SapphireOre,
    RubyOre,
    CraftingTable,
    Furnace,
    Torch,
    PlacedStone,
    Sapling,
    RipePlant,
    LadderDown,
    LadderUp,
    Fountain,
    Lava,
    DarkFloor,
}

impl TileKind {
    pub const COUNT: usize = 23;

    pub const ALL: [TileKind; Self::COUNT] = [
        TileKind::OutOfBounds,
        TileKind::Grass,
        TileKind::Water,
        TileKind::Sand,
        TileKind::Stone,
        TileKind::Path,
        TileKind::Tree,
        TileKind::CoalOre,
        TileKind::IronOre,
        TileKind::DiamondOre,
        TileKind::SapphireOre,
        TileKind::RubyOre,
        TileKind::CraftingTable,
        TileKind::Furnace,
        TileKind::Torch,
        TileKind::PlacedStone,
        TileKind::Sapling,
        TileKind::RipePlant,
        TileKind::LadderDown,
        TileKind::LadderUp,
        TileKind::Fountain,
        TileKind::Lava,
        TileKind::DarkFloor,
    ];

    #[inline]
    pub const fn index(self) -> usize {
        self as usize
    }

    /// Cells agents and mobs may stand on. Lava is enterable (and lethal).
    #[inline]
    pub const fn walkable(self) -> bool {
        matches!(
            self,
            TileKind::Grass
                | TileKind::Sand
                | TileKind::Path
                | TileKind::LadderDown
                | TileKind::LadderUp
                | TileKind::DarkFloor
                | TileKind::Lava
        )
    }

    /// Walkable and not lethal; used by mobs and path searches.
    #[inline]
    pub const fn safe(self) -> bool {
        self.walkable() && !matches!(self, TileKind::Lava)
    }

    /// Tiles a block (table, stone, torch, ...) may be placed onto.
    #[inline]
    pub const fn placeable(self) -> bool {
        matches!(
            self,
            TileKind::Grass | TileKind::Sand | TileKind::Path | TileKind::DarkFloor
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            TileKind::OutOfBounds => "out_of_bounds",
            TileKind::Grass => "grass",
            TileKind::Water => "water",
            TileKind::Sand => "sand",
            TileKind::Stone => "stone",
            TileKind::Path => "path",
            TileKind::Tree => "tree",
            TileKind::CoalOre => "coal_ore",
            TileKind::IronOre => "iron_ore",
            TileKind::DiamondOre => "diamond_ore",
            TileKind::SapphireOre => "sapphire_ore",
            TileKind::RubyOre => "ruby_ore",
            TileKind::CraftingTable => "crafting_table",
            TileKind::Furnace => "furnace",
            TileKind::Torch => "torch",
            TileKind::PlacedStone => "placed_stone",
            TileKind::Sapling => "sapling",
            TileKind::RipePlant => "ripe_plant",
            TileKind::LadderDown => "ladder_down",
            TileKind::LadderUp => "ladder_up",
            TileKind::Fountain => "fountain",
            TileKind::Lava => "lava",
            TileKind::DarkFloor => "dark_floor",
        }
    }
}

/// Named dungeon levels, indexed by floor.
pub const FLOOR_NAMES: [&str; 9] = [
    "overworld",
    "dungeon",
    "gnomish_mines",
    "sewers",
    "vault",
    "troll_mines",
    "fire_realm",
    "ice_realm",
    "graveyard",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorMap {
    pub width: u16,
    pub height: u16,
    pub floor_index: u8,
    pub tiles: Vec<TileKind>,
    /// Per-cell light for dungeon floors. Empty on the overworld, whose light
    /// is the global daylight value.
    pub light: Vec<f32>,
    pub ladder_down: Option<Pos>,
    pub ladder_up: Option<Pos>,
}

impl FloorMap {
    pub fn filled(width: u16, height: u16, floor_index: u8, tile: TileKind) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            floor_index,
            tiles: vec![tile; n],
            light: if floor_index == 0 { Vec::new() } else { vec![0.0; n] },
            ladder_down: None,
            ladder_up: None,
        }
    }

    #[inline]
    pub fn in_bounds(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as u16) < self.width && (p.y as u16) < self.height
    }

    #[inline]
    pub fn idx(&self, p: Pos) -> usize {
        p.y as usize * self.width as usize + p.x as usize
    }

    #[inline]
    pub fn get(&self, p: Pos) -> TileKind {
        if self.in_bounds(p) {
            self.tiles[self.idx(p)]
        } else {
            TileKind::OutOfBounds
        }
    }

    #[inline]
    pub fn set(&mut self, p: Pos, t: TileKind) {
        let i = self.idx(p);
        self.tiles[i] = t;
    }

    #[inline]
    pub fn light_at(&self, p: Pos, daylight: f32) -> f32 {
        if self.floor_index == 0 {
            daylight
        } else if self.in_bounds(p) {
            self.light[self.idx(p)]
        } else {
            0.0
        }
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> + '_ {
        let w = self.width as i16;
        (0..self.tiles.len()).map(move |i| Pos::new(i as i16 % w, i as i16 / w))
    }

    pub fn count(&self, tile: TileKind) -> usize {
        self.tiles.iter().filter(|&&t| t == tile).count()
    }
}

impl Hash for FloorMap {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.width.hash(state);
        self.height.hash(state);
        self.floor_index.hash(state);
        self.tiles.hash(state);
        for l in &self.light {
            l.to_bits().hash(state);
        }
        self.ladder_down.hash(state);
        self.ladder_up.hash(state);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum MobKind {
    Cow,
    Bat,
    Zombie,
    /// Ranged attacker.
    Skeleton,
}

impl MobKind {
    pub const COUNT: usize = 4;
    pub const ALL: [MobKind; 4] = [MobKind::Cow, MobKind::Bat, MobKind::Zombie, MobKind::Skeleton];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn hostile(self) -> bool {
        matches!(self, MobKind::Zombie | MobKind::Skeleton)
    }

    pub const fn max_health(self) -> u8 {
        match self {
            MobKind::Cow => 3,
            MobKind::Bat => 2,
            MobKind::Zombie => 5,
            MobKind::Skeleton => 3,
        }
    }

    /// Whether this kind lives on `floor`. Cows roam the overworld, bats and
    /// skeletons the dungeons, zombies everywhere.
    pub const fn lives_on(self, floor: u8) -> bool {
        match self {
            MobKind::Cow => floor == 0,
            MobKind::Bat | MobKind::Skeleton => floor > 0,
            MobKind::Zombie => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MobKind::Cow => "cow",
            MobKind::Bat => "bat",
            MobKind::Zombie => "zombie",
            MobKind::Skeleton => "skeleton",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mob {
    pub kind: MobKind,
    pub floor: u8,
    pub pos: Pos,
    pub health: u8,
    pub cooldown: u8,
}

/// A planted sapling growing towards a ripe plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plant {
    pub floor: u8,
    pub pos: Pos,
    pub age: u16,
}

/// Full mutable simulation state of one environment instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Hash)]
pub struct WorldState {
    pub floors: Vec<FloorMap>,
    pub mobs: Vec<Mob>,
    pub agents: Vec<AgentState>,
    /// Open trade requests, at most one per requester, sorted by requester.
    pub requests: Vec<TradeRequest>,
    pub plants: Vec<Plant>,
    pub ledger: AchievementLedger,
    /// Environment timesteps elapsed in this episode.
    pub time: u64,
    /// Episode stream; per-step streams are split from it by `time`.
    pub rng: RngState,
}

impl WorldState {
    #[inline]
    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agent_at(&self, floor: u8, p: Pos) -> Option<usize> {
        self.agents.iter().position(|a| a.floor == floor && a.pos == p)
    }

    pub fn mob_at(&self, floor: u8, p: Pos) -> Option<usize> {
        self.mobs
            .iter()
            .position(|m| m.floor == floor && m.pos == p && m.health > 0)
    }

    pub fn occupied(&self, floor: u8, p: Pos) -> bool {
        self.agent_at(floor, p).is_some() || self.mob_at(floor, p).is_some()
    }

    pub fn mob_count(&self, floor: u8, kind: MobKind) -> usize {
        self.mobs.iter().filter(|m| m.floor == floor && m.kind == kind).count()
    }

    pub fn all_dead(&self) -> bool {
        self.agents.iter().all(|a| !a.alive)
    }

    /// Stable 64-bit FNV-1a digest of the complete state.
    pub fn state_hash(&self) -> u64 {
        let mut h = Fnv64::default();
        self.hash(&mut h);
        h.finish()
    }
}

/// FNV-1a; std's `DefaultHasher` is not guaranteed stable across releases.
#[derive(Debug, Clone, Copy)]
pub struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Fnv64(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for Fnv64 {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
}
