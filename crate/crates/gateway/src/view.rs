//! Per-seat views decoded from the seat's own observation vector.
//!
//! Nothing here reads the world state directly: the tile window, meters,
//! inventory and teammate cards all come from the observation slices, so a
//! view can never leak what the seat's observation hides.

use std::collections::BTreeMap;

use coopcraft::agent::meter_cap;
use coopcraft::obs::specialization_from_one_hot;
use coopcraft::{Env, EnvConfig, Event, ObsLayout, Specialization, Transition};
use serde::{Deserialize, Serialize};

pub const FACING: [&str; 4] = ["north", "south", "east", "west"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marker {
    pub row: usize,
    pub col: usize,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeammateView {
    pub agent: usize,
    pub health: u8,
    pub specialization: Option<String>,
    pub alive: bool,
    /// Compass bearing when off screen, `below`/`above` on another floor,
    /// `none` when visible.
    pub direction: String,
    /// Window cell when visible.
    pub position: Option<(usize, usize)>,
    pub request: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestView {
    pub agent: usize,
    pub resource: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub agent: usize,
    /// (rows, cols) of the tile window; the seat stands in the centre.
    pub window: (usize, usize),
    /// Tile names, row-major; masked cells read `darkness`.
    pub tiles: Vec<Vec<String>>,
    pub light: Vec<Vec<f32>>,
    pub mobs: Vec<Marker>,
    pub ladders: Vec<Marker>,
    pub health: u8,
    pub food: u8,
    pub water: u8,
    pub energy: u8,
    /// Non-empty inventory slots.
    pub inventory: BTreeMap<String, u8>,
    pub specialization: Option<String>,
    pub facing: String,
    pub floor: usize,
    pub cell_light: f32,
    pub sleeping: bool,
    pub teammates: Vec<TeammateView>,
    /// Teammates' open trade requests.
    pub requests: Vec<RequestView>,
    /// Events this seat took part in, plus deaths, revives and requests
    /// (all of which the observation exposes anyway).
    pub events: Vec<Event>,
    pub reward: f32,
}

fn argmax(v: &[f32]) -> Option<usize> {
    v.iter().position(|&x| x > 0.5)
}

fn scaled(x: f32, max: u8) -> u8 {
    (x * max as f32).round() as u8
}

fn spec_name(v: &[f32]) -> Option<String> {
    match specialization_from_one_hot(v) {
        Specialization::None => None,
        s => Some(s.name().to_string()),
    }
}

/// Decodes one agent's observation. `events` and `reward` are left empty.
pub fn decode(obs: &[f32], layout: &ObsLayout, cfg: &EnvConfig, agent: usize) -> View {
    let slice = |name: &str| &obs[layout.range(name).unwrap_or(0..0)];
    let (h, w) = layout.window;
    let surv = &cfg.survival;

    let tile_obs = slice("map.tiles");
    let mob_obs = slice("map.mobs");
    let item_obs = slice("map.items");
    let tc = layout.tile_channels.len();
    let mc = layout.mob_channels.len();
    let ic = layout.item_channels.len();
    let mut tiles = vec![Vec::with_capacity(w); h];
    let mut light = vec![vec![0.0; w]; h];
    let mut mobs = Vec::new();
    let mut ladders = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let cell = r * w + c;
            let t = argmax(&tile_obs[cell * tc..(cell + 1) * tc]).unwrap_or(tc - 1);
            tiles[r].push(layout.tile_channels[t].clone());
            if let Some(m) = argmax(&mob_obs[cell * mc..(cell + 1) * mc]) {
                mobs.push(Marker {
                    row: r,
                    col: c,
                    kind: layout.mob_channels[m].clone(),
                });
            }
            let items = &item_obs[cell * ic..(cell + 1) * ic];
            for (k, name) in layout.item_channels.iter().enumerate().take(2) {
                if items[k] > 0.5 {
                    ladders.push(Marker {
                        row: r,
                        col: c,
                        kind: name.clone(),
                    });
                }
            }
            light[r][c] = items[2];
        }
    }

    let inventory = slice("inventory")
        .iter()
        .zip(&layout.inventory_caps)
        .map(|(&x, (name, cap))| (name.clone(), scaled(x, *cap)))
        .filter(|&(_, n)| n > 0)
        .collect();

    let specialization = layout
        .range("specialization")
        .map(|r| spec_name(&obs[r]))
        .unwrap_or(None);
    let spec = layout
        .range("specialization")
        .map(|r| specialization_from_one_hot(&obs[r]))
        .unwrap_or(Specialization::None);
    let cap = meter_cap(spec, surv);
    let meters = slice("meters");

    let mut teammates = Vec::new();
    let mut requests = Vec::new();
    for (k, j) in layout.teammates(agent).enumerate() {
        let p = format!("teammate{k}.");
        let field = |name: &str| &obs[layout.range(&format!("{p}{name}")).unwrap_or(0..0)];
        let position = argmax(field("position")).map(|i| (i / w, i % w));
        let direction = argmax(field("direction"))
            .map(|d| layout.direction_channels[d].clone())
            .unwrap_or_else(|| "none".into());
        let request = argmax(field("request"))
            .map(|i| layout.request_channels[i].clone())
            .filter(|n| n != "none");
        if let Some(resource) = &request {
            requests.push(RequestView {
                agent: j,
                resource: resource.clone(),
            });
        }
        teammates.push(TeammateView {
            agent: j,
            health: scaled(field("health")[0], surv.max_health),
            specialization: spec_name(field("specialization")),
            alive: field("alive")[0] > 0.5,
            direction,
            position,
            request,
        });
    }

    View {
        agent,
        window: (h, w),
        tiles,
        light,
        mobs,
        ladders,
        health: scaled(meters[0], surv.max_health),
        food: scaled(meters[1], cap),
        water: scaled(meters[2], cap),
        energy: scaled(meters[3], surv.max_energy),
        inventory,
        specialization,
        facing: FACING[argmax(slice("facing")).unwrap_or(1)].to_string(),
        floor: argmax(slice("floor")).unwrap_or(0),
        cell_light: slice("light")[0],
        sleeping: slice("sleeping")[0] > 0.5,
        teammates,
        requests,
        events: Vec::new(),
        reward: 0.0,
    }
}

/// Whether `seat` may be told about `event`.
pub fn visible_to(event: &Event, seat: usize) -> bool {
    matches!(
        event,
        Event::AgentDied { .. } | Event::Revive { .. } | Event::RequestOpened { .. } | Event::RequestCancelled { .. }
    ) || event.involves(seat as u8)
}

/// The view `seat` gets after `last` (or at reset when `None`).
pub fn build(env: &Env, seat: usize, last: Option<&Transition>) -> View {
    let mut v = decode(&env.observation(seat), env.layout(), env.config(), seat);
    if let Some(t) = last {
        v.events = t.info.events.iter().filter(|e| visible_to(e, seat)).copied().collect();
        v.reward = t.rewards[seat];
    }
    v
}

/// Running episode totals shared by live sessions and replays.
#[derive(Debug, Clone, Default)]
pub struct Tally {
    pub returns: Vec<f32>,
    pub trades: usize,
    pub deaths: usize,
    pub revives: usize,
}

impl Tally {
    pub fn new(n_agents: usize) -> Self {
        Self {
            returns: vec![0.0; n_agents],
            ..Self::default()
        }
    }

    pub fn record(&mut self, t: &Transition) {
        for (r, x) in self.returns.iter_mut().zip(&t.rewards) {
            *r += x;
        }
        for e in &t.info.events {
            match e {
                Event::Trade { .. } => self.trades += 1,
                Event::AgentDied { .. } => self.deaths += 1,
                Event::Revive { .. } => self.revives += 1,
                _ => {}
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub steps: u64,
    pub returns: Vec<f32>,
    pub team_return: f32,
    pub max_total: f32,
    pub percent_of_max: f32,
    pub score_percent: f32,
    pub achievements: Vec<Vec<String>>,
    pub trades: usize,
    pub deaths: usize,
    pub revives: usize,
}

impl Summary {
    pub fn new(env: &Env, tally: &Tally) -> Self {
        let team_return: f32 = tally.returns.iter().sum();
        let max_total = env.max_total();
        Self {
            steps: env.state().time,
            returns: tally.returns.clone(),
            team_return,
            max_total,
            percent_of_max: if max_total > 0.0 {
                100.0 * team_return / max_total
            } else {
                0.0
            },
            score_percent: env.score_percent(),
            achievements: env
                .state()
                .ledger
                .summary()
                .into_iter()
                .map(|v| v.into_iter().map(String::from).collect())
                .collect(),
            trades: tally.trades,
            deaths: tally.deaths,
            revives: tally.revives,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use coopcraft::{ActionId, Item, TileKind};

    #[test]
    fn decode_matches_state() {
        let mut env = Env::new(EnvConfig::coop(), 12).unwrap();
        env.state_mut().agents[1].inventory.add(Item::Stone, 3);
        let v = build(&env, 1, None);
        let a = &env.state().agents[1];
        assert_eq!(v.health, a.health);
        assert_eq!(v.food, a.food);
        assert_eq!(v.water, a.water);
        assert_eq!(v.energy, a.energy);
        assert_eq!(v.inventory.get("stone"), Some(&3));
        assert_eq!(v.specialization.as_deref(), Some("forager"));
        assert_eq!(v.teammates.iter().map(|t| t.agent).collect::<Vec<_>>(), [0, 2]);
        let (h, w) = v.window;
        assert_eq!(v.tiles.len(), h);
        let centre = &v.tiles[h / 2][w / 2];
        assert_eq!(centre, env.state().floors[0].get(a.pos).name());
    }

    #[test]
    fn teammate_request_shows_up() {
        let mut env = Env::new(EnvConfig::coop(), 3).unwrap();
        let space = env.action_space();
        let req = space.id_by_name("REQUEST_STONE").unwrap();
        let t = env.step_raw(&[ActionId(0), ActionId(0), req]).unwrap();
        let v = build(&env, 0, Some(&t));
        assert_eq!(
            v.requests,
            [RequestView {
                agent: 2,
                resource: "stone".into()
            }]
        );
        assert_eq!(v.teammates[1].request.as_deref(), Some("stone"));
        assert!(v
            .events
            .iter()
            .any(|e| matches!(e, Event::RequestOpened { agent: 2, .. })));
        assert!(build(&env, 2, Some(&t)).requests.is_empty());
    }

    #[test]
    fn private_events_stay_private() {
        let mut env = Env::new(EnvConfig::coop(), 8).unwrap();
        let a = env.state().agents[0].clone();
        env.state_mut().floors[0].set(a.facing_cell(), TileKind::Tree);
        let t = env.step_raw(&[ActionId(5), ActionId(0), ActionId(0)]).unwrap();
        assert!(build(&env, 0, Some(&t))
            .events
            .iter()
            .any(|e| matches!(e, Event::Harvest { .. })));
        assert!(build(&env, 1, Some(&t)).events.is_empty());
    }
}
