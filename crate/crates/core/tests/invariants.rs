use coopcraft::obs::TILE_CHANNELS;
use coopcraft::world::Direction;
use coopcraft::{ActionId, Env, EnvConfig, Item, MobKind, TileKind};
use proptest::prelude::*;

fn config(coop: bool, n: usize) -> EnvConfig {
    if coop {
        EnvConfig::coop()
    } else {
        EnvConfig::ma(n)
    }
}

fn check_state(env: &Env) -> Result<(), TestCaseError> {
    let s = env.state();
    let cfg = env.config();
    let surv = &cfg.survival;
    for a in &s.agents {
        let fl = &s.floors[a.floor as usize];
        prop_assert!(fl.in_bounds(a.pos));
        prop_assert!(a.health <= surv.max_health);
        prop_assert!(a.energy <= surv.max_energy);
        let cap = a.meter_cap(surv);
        prop_assert!(a.food <= cap && a.water <= cap);
        prop_assert_eq!(a.alive, a.health > 0);
        for (item, n) in a.inventory.iter() {
            prop_assert!(n <= item.cap(), "{:?} {}", item, n);
        }
        if a.alive {
            prop_assert!(fl.get(a.pos).walkable(), "agent on {:?}", fl.get(a.pos));
        }
    }
    for (i, a) in s.agents.iter().enumerate() {
        for b in &s.agents[i + 1..] {
            prop_assert!(!(a.floor == b.floor && a.pos == b.pos), "agents share a cell");
        }
    }
    for m in &s.mobs {
        prop_assert!(m.health > 0 && m.health <= m.kind.max_health());
        prop_assert!(m.kind.lives_on(m.floor));
        prop_assert!(s.agent_at(m.floor, m.pos).is_none(), "mob on an agent");
        if m.kind != MobKind::Bat {
            prop_assert!(s.floors[m.floor as usize].get(m.pos).safe());
        }
    }
    prop_assert!(s.requests.windows(2).all(|w| w[0].requester < w[1].requester));
    prop_assert!(s.requests.iter().all(|r| r.ttl >= 1 && r.ttl <= 10));
    Ok(())
}

fn check_obs(env: &Env, obs: &[f32]) -> Result<(), TestCaseError> {
    let layout = env.layout();
    prop_assert_eq!(obs.len(), layout.total * env.n_agents());
    prop_assert!(obs.iter().all(|x| x.is_finite() && (0.0..=1.0).contains(x)));
    for agent_obs in obs.chunks(layout.total) {
        let tiles = &agent_obs[layout.range("map.tiles").unwrap()];
        for cell in tiles.chunks(TILE_CHANNELS) {
            prop_assert_eq!(cell.iter().sum::<f32>(), 1.0);
        }
        let facing = &agent_obs[layout.range("facing").unwrap()];
        prop_assert_eq!(facing.iter().sum::<f32>(), 1.0);
        let floor = &agent_obs[layout.range("floor").unwrap()];
        prop_assert_eq!(floor.iter().sum::<f32>(), 1.0);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn random_play_keeps_invariants(
        seed in any::<u64>(),
        coop in any::<bool>(),
        n in 1usize..5,
        actions in prop::collection::vec(any::<u16>(), 300..600),
    ) {
        let cfg = config(coop, n);
        let mut env = Env::new(cfg, seed).unwrap();
        let k = env.n_agents();
        let len = env.action_space().len() as u16;
        let mut ledger_total = 0;
        for chunk in actions.chunks(k) {
            if chunk.len() < k {
                break;
            }
            let acts: Vec<ActionId> = chunk.iter().map(|a| ActionId(a % len)).collect();
            let r = env.step(&acts).unwrap();
            check_state(&env)?;
            check_obs(&env, &r.observations)?;
            let total = env.state().ledger.total();
            prop_assert!(total >= ledger_total);
            prop_assert_eq!(total - ledger_total, r.info.achievements.len());
            ledger_total = total;
            if r.done {
                break;
            }
        }
    }

    #[test]
    fn tree_harvest_depletes_to_grass(seed in 0u64..500) {
        let mut env = Env::new(EnvConfig::ma(1), seed).unwrap();
        let (pos, dir) = {
            let a = &env.state().agents[0];
            (a.pos, a.facing)
        };
        let target = pos.step(dir);
        prop_assume!(env.state().floors[0].in_bounds(target));
        prop_assume!(env.state().mob_at(0, target).is_none());
        env.state_mut().floors[0].set(target, TileKind::Tree);
        let r = env.step(&[ActionId(5)]).unwrap();
        prop_assert_eq!(env.state().agents[0].inventory.get(Item::Wood), 1);
        prop_assert_eq!(env.state().floors[0].get(target), TileKind::Grass);
        prop_assert!(r.info.achievements.iter().any(|a| a.1.name() == "COLLECT_WOOD"));
    }

    #[test]
    fn facing_follows_blocked_moves(seed in 0u64..200, d in 0usize..4) {
        let mut env = Env::new(EnvConfig::ma(1), seed).unwrap();
        let dir = Direction::ALL[d];
        let pos = env.state().agents[0].pos;
        let ahead = pos.step(dir);
        prop_assume!(env.state().floors[0].in_bounds(ahead));
        env.state_mut().floors[0].set(ahead, TileKind::Stone);
        let id = env.action_space().encode(coopcraft::Action::Move(dir)).unwrap();
        env.step(&[id]).unwrap();
        prop_assert_eq!(env.state().agents[0].pos, pos);
        prop_assert_eq!(env.state().agents[0].facing, dir);
    }
}
