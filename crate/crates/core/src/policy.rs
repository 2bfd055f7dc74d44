//! Built-in policies: uniform random and scripted role bots.
//!
//! Scripted bots read the full world state and path-find with BFS. They are
//! baselines and test drivers, not learners.

use std::collections::VecDeque;

use crate::agent::{Action, ActionId, ActionSpace, Item, Specialization};
use crate::coop::{open_request_of, TradableResource};
use crate::error::{Error, Result};
use crate::rng::{tags, RngState};
use crate::world::{Direction, MobKind, Pos, TileKind, WorldState};

/// Chooses one action for one agent.
pub trait Policy: Send {
    fn name(&self) -> &str;
    fn act(&mut self, state: &WorldState, agent: usize, space: &ActionSpace) -> ActionId;
}

#[derive(Debug, Clone)]
pub struct RandomPolicy {
    rng: RngState,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: RngState::new(seed).split(tags::POLICY),
        }
    }
}

impl Policy for RandomPolicy {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&mut self, _: &WorldState, _: usize, space: &ActionSpace) -> ActionId {
        ActionId(self.rng.below(space.len() as u32) as u16)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoopPolicy;

impl Policy for NoopPolicy {
    fn name(&self) -> &str {
        "noop"
    }

    fn act(&mut self, _: &WorldState, _: usize, _: &ActionSpace) -> ActionId {
        ActionId(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Mines stone, crafts pickaxes and answers material requests.
    MinerTrader,
    /// Drinks, hunts and keeps teammates fed and watered.
    ForagerFeeder,
    /// Requests stone and crafts swords.
    WarriorRequester,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::MinerTrader => "miner-trader",
            Role::ForagerFeeder => "forager-feeder",
            Role::WarriorRequester => "warrior-requester",
        }
    }

    pub fn from_name(s: &str) -> Option<Role> {
        match s {
            "miner-trader" | "miner" => Some(Role::MinerTrader),
            "forager-feeder" | "forager" => Some(Role::ForagerFeeder),
            "warrior-requester" | "warrior" => Some(Role::WarriorRequester),
            _ => None,
        }
    }

    /// Role matching a coop specialization.
    pub fn for_specialization(s: Specialization) -> Role {
        match s {
            Specialization::Forager => Role::ForagerFeeder,
            Specialization::Warrior => Role::WarriorRequester,
            _ => Role::MinerTrader,
        }
    }
}

/// How far (in steps) a bot walks to reuse an existing crafting table.
const TABLE_SEARCH: usize = 14;
const LOW_METER: u8 = 4;

#[derive(Debug, Clone)]
pub struct ScriptedBot {
    role: Role,
    rng: RngState,
    task: Option<Task>,
}

/// A need the bot keeps pursuing until it is met.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Task {
    Drink,
    Hunt,
}

impl ScriptedBot {
    pub fn new(role: Role, seed: u64) -> Self {
        Self {
            role,
            rng: RngState::new(seed).split(tags::POLICY).split(role as u64 + 1),
            task: None,
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// The decoded action this bot wants to take.
    pub fn decide(&mut self, s: &WorldState, i: usize, space: &ActionSpace) -> Action {
        let a = &s.agents[i];
        if !a.alive || a.sleeping {
            return Action::Noop;
        }
        if let Some(act) = self.common(s, i, space) {
            return act;
        }
        let act = match self.role {
            Role::MinerTrader => self.miner(s, i),
            Role::ForagerFeeder => self.forager(s, i, space),
            Role::WarriorRequester => self.warrior(s, i),
        };
        act.unwrap_or_else(|| self.wander(s, i))
    }

    /// Shared reflexes: sleep, self-defence, reviving and asking for food or water.
    fn common(&mut self, s: &WorldState, i: usize, space: &ActionSpace) -> Option<Action> {
        let a = &s.agents[i];
        if a.energy <= 2 {
            return Some(Action::Sleep);
        }
        for d in Direction::ALL {
            let c = a.pos.step(d);
            if let Some(m) = s.mob_at(a.floor, c) {
                if s.mobs[m].kind.hostile() {
                    return Some(face_or(a.facing, d, Action::Do));
                }
            }
            if space.variant == crate::Variant::Coop {
                if let Some(j) = s.agent_at(a.floor, c) {
                    if !s.agents[j].alive {
                        return Some(face_or(a.facing, d, Action::Do));
                    }
                }
            }
        }
        if space.variant != crate::Variant::Coop || self.role == Role::ForagerFeeder {
            return None;
        }
        let want = if a.water <= LOW_METER && a.water <= a.food {
            Some(TradableResource::Water)
        } else if a.food <= LOW_METER {
            Some(TradableResource::Food)
        } else {
            None
        };
        let want = want?;
        match open_request_of(s, i as u8) {
            Some(r) if r.resource == want => None,
            _ => Some(Action::Request(want)),
        }
    }

    fn miner(&mut self, s: &WorldState, i: usize) -> Option<Action> {
        let a = &s.agents[i];
        let inv = &a.inventory;
        if let Some(g) = self.answer_requests(s, i, |r| r.item().is_some()) {
            return Some(g);
        }
        if inv.pickaxe_tier() == 0 {
            return self.craft_with_table(s, i, Action::MakeWoodPickaxe, &[(Item::Wood, 1)]);
        }
        if inv.pickaxe_tier() == 1 && inv.has(Item::Stone, 1) {
            if let Some(act) =
                self.craft_with_table(s, i, Action::MakeStonePickaxe, &[(Item::Wood, 1), (Item::Stone, 1)])
            {
                return Some(act);
            }
        }
        if inv.get(Item::Stone) < 6 {
            if let Some(act) = harvest(s, i, |t| t == TileKind::Stone) {
                return Some(act);
            }
        }
        if inv.get(Item::Coal) < 2 {
            if let Some(act) = harvest(s, i, |t| t == TileKind::CoalOre) {
                return Some(act);
            }
        }
        if inv.get(Item::Wood) < 4 {
            return harvest(s, i, |t| t == TileKind::Tree);
        }
        None
    }

    fn forager(&mut self, s: &WorldState, i: usize, space: &ActionSpace) -> Option<Action> {
        let a = &s.agents[i];
        if space.variant == crate::Variant::Coop {
            let spare = |r: TradableResource| match r {
                TradableResource::Food => a.food > 5,
                TradableResource::Water => a.water > 4,
                _ => false,
            };
            if let Some(g) = self.answer_requests(s, i, spare) {
                return Some(g);
            }
        }
        let cap = if a.specialization == Specialization::Forager {
            12
        } else {
            9
        };
        let hungry_team = s
            .agents
            .iter()
            .any(|t| t.alive && t.id as usize != i && t.food <= LOW_METER + 1);
        self.task = match self.task {
            Some(Task::Drink) if a.water >= cap => None,
            Some(Task::Hunt) if (a.food + 3 > cap && !hungry_team) || a.water <= LOW_METER => None,
            t => t,
        };
        if self.task.is_none() {
            if a.water <= LOW_METER || (a.water + 3 <= cap && a.food > LOW_METER) {
                self.task = Some(Task::Drink);
            } else if a.food + 6 <= cap || hungry_team {
                self.task = Some(Task::Hunt);
            }
        }
        let act = match self.task {
            Some(Task::Drink) => harvest(s, i, |t| matches!(t, TileKind::Water | TileKind::Fountain)),
            Some(Task::Hunt) => {
                harvest(s, i, |t| t == TileKind::RipePlant).or_else(|| hunt(s, i, |k| matches!(k, MobKind::Cow)))
            }
            None => None,
        };
        if act.is_some() {
            return act;
        }
        self.task = None;
        if a.inventory.has(Item::Sapling, 1) {
            let f = &s.floors[a.floor as usize];
            if f.get(a.facing_cell()) == TileKind::Grass && !s.occupied(a.floor, a.facing_cell()) {
                return Some(Action::PlacePlant);
            }
        }
        // Stay close to the team.
        let far = s
            .agents
            .iter()
            .filter(|t| t.id as usize != i && t.alive && t.floor == a.floor)
            .map(|t| t.pos.manhattan(a.pos))
            .max()
            .unwrap_or(0);
        if far > 8 {
            let others: Vec<Pos> = s
                .agents
                .iter()
                .filter(|t| t.id as usize != i && t.alive && t.floor == a.floor)
                .map(|t| t.pos)
                .collect();
            if let Some(act) = approach(s, i, |p| others.iter().any(|o| o.manhattan(p) <= 3)) {
                return Some(act);
            }
        }
        if self.rng.chance(0.3) {
            return harvest(s, i, |t| t == TileKind::Grass);
        }
        None
    }

    fn warrior(&mut self, s: &WorldState, i: usize) -> Option<Action> {
        let a = &s.agents[i];
        let inv = &a.inventory;
        if !inv.has(Item::StoneSword, 1) {
            if inv.has(Item::Stone, 1) && inv.has(Item::Wood, 1) {
                if let Some(act) =
                    self.craft_with_table(s, i, Action::MakeStoneSword, &[(Item::Wood, 1), (Item::Stone, 1)])
                {
                    return Some(act);
                }
            }
            if !inv.has(Item::Stone, 1) && open_request_of(s, i as u8).is_none() {
                return Some(Action::Request(TradableResource::Stone));
            }
        }
        if !inv.has(Item::WoodSword, 1) && inv.has(Item::Wood, 2) && table_reachable(s, i) {
            return self.craft_with_table(s, i, Action::MakeWoodSword, &[(Item::Wood, 1)]);
        }
        if inv.get(Item::Wood) < 4 {
            if let Some(act) = harvest(s, i, |t| t == TileKind::Tree) {
                return Some(act);
            }
        }
        if inv.has(Item::StoneSword, 1) && a.health > 6 {
            return hunt(s, i, |k| k.hostile() && k != MobKind::Skeleton);
        }
        None
    }

    /// Gives to the lowest-id teammate whose open request `ok` accepts and we can fill.
    fn answer_requests(&self, s: &WorldState, i: usize, ok: impl Fn(TradableResource) -> bool) -> Option<Action> {
        let a = &s.agents[i];
        s.requests
            .iter()
            .filter(|r| r.requester as usize != i && s.agents[r.requester as usize].alive && ok(r.resource))
            .find(|r| match r.resource.item() {
                Some(item) => a.inventory.has(item, 1) && s.agents[r.requester as usize].inventory.room_for(item, 1),
                None => true,
            })
            .map(|r| Action::Give(r.requester))
    }

    /// Crafts `act` at a table, walking to or placing one first.
    fn craft_with_table(&mut self, s: &WorldState, i: usize, act: Action, cost: &[(Item, u8)]) -> Option<Action> {
        let a = &s.agents[i];
        let have = cost.iter().all(|&(it, n)| a.inventory.has(it, n));
        if crate::agent::near(s, i, TileKind::CraftingTable) {
            if have {
                return Some(act);
            }
            return harvest(s, i, |t| t == TileKind::Tree);
        }
        if table_reachable(s, i) {
            return approach(s, i, |p| near_tile(s, a.floor, p, TileKind::CraftingTable));
        }
        let extra = cost.iter().find(|c| c.0 == Item::Wood).map_or(0, |c| c.1);
        if a.inventory.has(Item::Wood, 1 + extra)
            && cost.iter().all(|&(it, n)| it == Item::Wood || a.inventory.has(it, n))
        {
            return place_somewhere(s, i, Action::PlaceTable);
        }
        harvest(s, i, |t| t == TileKind::Tree)
    }

    fn wander(&mut self, s: &WorldState, i: usize) -> Action {
        let a = &s.agents[i];
        let fl = &s.floors[a.floor as usize];
        let open: Vec<Direction> = Direction::ALL
            .into_iter()
            .filter(|&d| fl.get(a.pos.step(d)).safe() && !s.occupied(a.floor, a.pos.step(d)))
            .collect();
        if open.is_empty() || self.rng.chance(0.2) {
            return Action::Noop;
        }
        Action::Move(open[self.rng.below(open.len() as u32) as usize])
    }
}

impl Policy for ScriptedBot {
    fn name(&self) -> &str {
        self.role.name()
    }

    fn act(&mut self, state: &WorldState, agent: usize, space: &ActionSpace) -> ActionId {
        let act = self.decide(state, agent, space);
        space.encode(act).unwrap_or(ActionId(0))
    }
}

fn face_or(facing: Direction, d: Direction, then: Action) -> Action {
    if facing == d {
        then
    } else {
        Action::Face(d)
    }
}

fn near_tile(s: &WorldState, floor: u8, p: Pos, tile: TileKind) -> bool {
    let fl = &s.floors[floor as usize];
    let r = crate::agent::STATION_RADIUS as i16;
    (-r..=r).any(|dy| (-r..=r).any(|dx| fl.get(Pos::new(p.x + dx, p.y + dy)) == tile))
}

fn table_reachable(s: &WorldState, i: usize) -> bool {
    let a = &s.agents[i];
    path_to(s, i, TABLE_SEARCH, |p| {
        near_tile(s, a.floor, p, TileKind::CraftingTable)
    })
    .is_some()
}

/// BFS over safe, unoccupied cells from agent `i`. Returns the first step and
/// the path length to the nearest cell satisfying `goal`.
fn path_to(s: &WorldState, i: usize, max_len: usize, goal: impl Fn(Pos) -> bool) -> Option<(Option<Direction>, usize)> {
    let a = &s.agents[i];
    let fl = &s.floors[a.floor as usize];
    if goal(a.pos) {
        return Some((None, 0));
    }
    let mut seen = vec![false; fl.tiles.len()];
    let mut q: VecDeque<(Pos, Direction, usize)> = VecDeque::new();
    seen[fl.idx(a.pos)] = true;
    for d in Direction::ALL {
        let n = a.pos.step(d);
        if fl.get(n).safe() && !s.occupied(a.floor, n) {
            seen[fl.idx(n)] = true;
            q.push_back((n, d, 1));
        }
    }
    while let Some((p, first, len)) = q.pop_front() {
        if goal(p) {
            return Some((Some(first), len));
        }
        if len >= max_len {
            continue;
        }
        for d in Direction::ALL {
            let n = p.step(d);
            if fl.in_bounds(n) && !seen[fl.idx(n)] && fl.get(n).safe() && !s.occupied(a.floor, n) {
                seen[fl.idx(n)] = true;
                q.push_back((n, first, len + 1));
            }
        }
    }
    None
}

fn approach(s: &WorldState, i: usize, goal: impl Fn(Pos) -> bool) -> Option<Action> {
    match path_to(s, i, usize::MAX, goal)? {
        (Some(d), _) => Some(Action::Move(d)),
        (None, _) => None,
    }
}

/// Walks next to the nearest tile matching `want`, faces it and hits DO.
fn harvest(s: &WorldState, i: usize, want: impl Fn(TileKind) -> bool) -> Option<Action> {
    let a = &s.agents[i];
    let fl = &s.floors[a.floor as usize];
    let target = |p: Pos| {
        Direction::ALL
            .into_iter()
            .find(|&d| want(fl.get(p.step(d))) && !s.occupied(a.floor, p.step(d)))
    };
    if let Some(d) = target(a.pos) {
        return Some(face_or(a.facing, d, Action::Do));
    }
    approach(s, i, |p| target(p).is_some())
}

/// Walks next to the nearest live mob matching `want` and attacks it.
fn hunt(s: &WorldState, i: usize, want: impl Fn(MobKind) -> bool) -> Option<Action> {
    let a = &s.agents[i];
    let target = |p: Pos| {
        Direction::ALL
            .into_iter()
            .find(|&d| s.mob_at(a.floor, p.step(d)).is_some_and(|m| want(s.mobs[m].kind)))
    };
    if let Some(d) = target(a.pos) {
        return Some(face_or(a.facing, d, Action::Do));
    }
    match path_to(s, i, usize::MAX, |p| target(p).is_some())? {
        (Some(d), _) => Some(Action::Move(d)),
        (None, _) => None,
    }
}

/// Faces a free placeable neighbour and performs `act`.
fn place_somewhere(s: &WorldState, i: usize, act: Action) -> Option<Action> {
    let a = &s.agents[i];
    let fl = &s.floors[a.floor as usize];
    let ok = |d: Direction| {
        let c = a.pos.step(d);
        fl.get(c).placeable() && !s.occupied(a.floor, c)
    };
    if ok(a.facing) {
        return Some(act);
    }
    Direction::ALL.into_iter().find(|&d| ok(d)).map(Action::Face)
}

/// One policy per agent slot.
pub struct TeamPolicy {
    spec: String,
    members: Vec<Box<dyn Policy>>,
}

impl std::fmt::Debug for TeamPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TeamPolicy").field("spec", &self.spec).finish()
    }
}

impl TeamPolicy {
    /// Parses `random`, `noop`, `scripted:trio` or `scripted:a,b,c`.
    /// Shorter scripted lists are cycled over the agents.
    pub fn parse(spec: &str, n_agents: usize, seed: u64) -> Result<Self> {
        let unknown = || Error::UnknownPolicy(spec.to_string());
        let members: Vec<Box<dyn Policy>> = match spec {
            "random" => (0..n_agents)
                .map(|i| Box::new(RandomPolicy::new(seed ^ (i as u64).wrapping_mul(0x9e37_79b9))) as Box<dyn Policy>)
                .collect(),
            "noop" => (0..n_agents).map(|_| Box::new(NoopPolicy) as Box<dyn Policy>).collect(),
            _ => {
                let list = spec.strip_prefix("scripted:").ok_or_else(unknown)?;
                let roles: Vec<Role> = if list == "trio" {
                    vec![Role::MinerTrader, Role::ForagerFeeder, Role::WarriorRequester]
                } else {
                    list.split(',')
                        .map(|n| Role::from_name(n.trim()))
                        .collect::<Option<_>>()
                        .ok_or_else(unknown)?
                };
                if roles.is_empty() {
                    return Err(unknown());
                }
                (0..n_agents)
                    .map(|i| {
                        Box::new(ScriptedBot::new(roles[i % roles.len()], seed.wrapping_add(i as u64)))
                            as Box<dyn Policy>
                    })
                    .collect()
            }
        };
        Ok(Self {
            spec: spec.to_string(),
            members,
        })
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn actions(&mut self, state: &WorldState, space: &ActionSpace) -> Vec<ActionId> {
        self.members
            .iter_mut()
            .enumerate()
            .map(|(i, p)| p.act(state, i, space))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EnvConfig;
    use crate::env::Env;

    #[test]
    fn parse_names() {
        assert!(TeamPolicy::parse("random", 3, 1).is_ok());
        assert!(TeamPolicy::parse("scripted:trio", 3, 1).is_ok());
        assert!(TeamPolicy::parse("scripted:miner-trader,forager,warrior", 3, 1).is_ok());
        assert!(matches!(
            TeamPolicy::parse("greedy", 3, 1),
            Err(Error::UnknownPolicy(_))
        ));
        assert!(matches!(
            TeamPolicy::parse("scripted:dancer", 3, 1),
            Err(Error::UnknownPolicy(_))
        ));
    }

    #[test]
    fn random_policy_stays_in_range_and_is_seeded() {
        let env = Env::new(EnvConfig::coop(), 1).unwrap();
        let space = env.action_space();
        let mut a = RandomPolicy::new(5);
        let mut b = RandomPolicy::new(5);
        for _ in 0..500 {
            let x = a.act(env.state(), 0, &space);
            assert_eq!(x, b.act(env.state(), 0, &space));
            assert!((x.0 as usize) < space.len());
        }
    }

    #[test]
    fn miner_bot_gets_a_pickaxe() {
        let mut env = Env::new(EnvConfig::coop(), 7).unwrap();
        let mut team = TeamPolicy::parse("scripted:trio", 3, 7).unwrap();
        let space = env.action_space();
        for _ in 0..400 {
            let acts = team.actions(env.state(), &space);
            env.step(&acts).unwrap();
            if env.state().agents[0].inventory.pickaxe_tier() > 0 {
                return;
            }
        }
        panic!("miner never crafted a pickaxe");
    }
}
