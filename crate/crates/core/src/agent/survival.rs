//! Hunger, thirst, fatigue, sleep, starvation damage and regeneration.

use serde::{Deserialize, Serialize};

use crate::config::{SurvivalConfig, WorldGenConfig};
use crate::event::Event;
use crate::world::{daylight, Direction, WorldState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Termination {
    pub done: bool,
    /// Set when the step cap, not team death, ended the episode.
    pub truncated: bool,
}

/// Whether an agent standing at its position is exposed: at night on the
/// overworld or anywhere underground, with at least one open neighbour.
fn exposed(state: &WorldState, i: usize, day_length: u32) -> bool {
    let a = &state.agents[i];
    let night = a.floor > 0 || daylight(state.time, day_length) < 0.5;
    if !night {
        return false;
    }
    let fl = &state.floors[a.floor as usize];
    Direction::ALL.iter().any(|&d| fl.get(a.pos.step(d)).walkable())
}

/// Advances every living agent's meters by one step. Dead agents are frozen.
pub fn survival_tick(state: &mut WorldState, cfg: &SurvivalConfig, world: &WorldGenConfig, events: &mut Vec<Event>) {
    for i in 0..state.agents.len() {
        if !state.agents[i].alive {
            continue;
        }
        let tired = !state.agents[i].sleeping && exposed(state, i, world.day_length);
        let a = &mut state.agents[i];

        a.hunger_clock += 1;
        if a.hunger_clock >= cfg.hunger_interval {
            a.hunger_clock = 0;
            a.food = a.food.saturating_sub(1);
        }
        a.thirst_clock += 1;
        if a.thirst_clock >= cfg.thirst_interval {
            a.thirst_clock = 0;
            a.water = a.water.saturating_sub(1);
        }

        if a.sleeping {
            a.fatigue_clock += 1;
            if a.fatigue_clock >= cfg.sleep_interval {
                a.fatigue_clock = 0;
                a.energy = (a.energy + 1).min(cfg.max_energy);
                if a.energy >= cfg.max_energy {
                    a.sleeping = false;
                    events.push(Event::WakeUp {
                        agent: a.id,
                        floor: a.floor,
                    });
                }
            }
        } else if tired {
            a.fatigue_clock += 1;
            if a.fatigue_clock >= cfg.fatigue_interval {
                a.fatigue_clock = 0;
                a.energy = a.energy.saturating_sub(1);
            }
        }

        if a.food == 0 || a.water == 0 || a.energy == 0 {
            a.recover_clock = 0;
            a.starve_clock += 1;
            if a.starve_clock >= cfg.damage_interval {
                a.starve_clock = 0;
                a.health = a.health.saturating_sub(1);
                if a.health == 0 {
                    a.alive = false;
                    a.sleeping = false;
                    events.push(Event::AgentDied { agent: a.id });
                }
            }
        } else {
            a.starve_clock = 0;
            if a.health < cfg.max_health {
                a.recover_clock += 1;
                if a.recover_clock >= cfg.regen_interval {
                    a.recover_clock = 0;
                    a.health += 1;
                }
            } else {
                a.recover_clock = 0;
            }
        }
    }
}

/// Done when every agent is dead, or (truncated) when `max_steps` is reached.
pub fn check_termination(state: &WorldState, max_steps: u64) -> Termination {
    if state.all_dead() {
        Termination {
            done: true,
            truncated: false,
        }
    } else if state.time >= max_steps {
        Termination {
            done: true,
            truncated: true,
        }
    } else {
        Termination::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::{AgentState, Specialization};
    use crate::rng::RngState;
    use crate::scoring::AchievementLedger;
    use crate::world::{FloorMap, Pos, TileKind};

    fn world() -> WorldState {
        let surv = SurvivalConfig::default();
        WorldState {
            floors: vec![FloorMap::filled(8, 8, 0, TileKind::Grass)],
            mobs: Vec::new(),
            agents: vec![AgentState::spawn(0, Specialization::None, Pos::new(4, 4), &surv)],
            requests: Vec::new(),
            plants: Vec::new(),
            ledger: AchievementLedger::new(1),
            time: 0,
            rng: RngState::new(0),
        }
    }

    fn tick(s: &mut WorldState, n: usize) -> Vec<Event> {
        let mut ev = Vec::new();
        for _ in 0..n {
            survival_tick(s, &SurvivalConfig::default(), &WorldGenConfig::default(), &mut ev);
        }
        ev
    }

    #[test]
    fn full_meters_no_health_change() {
        let mut s = world();
        tick(&mut s, 1);
        assert_eq!(s.agents[0].health, 10);
    }

    #[test]
    fn meters_decay_on_schedule() {
        let mut s = world();
        tick(&mut s, 24);
        assert_eq!(s.agents[0].food, 9);
        tick(&mut s, 1);
        assert_eq!(s.agents[0].food, 8);
        assert_eq!(s.agents[0].water, 8);
    }

    #[test]
    fn thirst_drains_health_after_damage_interval() {
        let mut s = world();
        s.agents[0].water = 0;
        s.agents[0].thirst_clock = 0;
        tick(&mut s, 9);
        assert_eq!(s.agents[0].health, 10);
        tick(&mut s, 1);
        assert_eq!(s.agents[0].health, 9);
    }

    #[test]
    fn starvation_kills() {
        let mut s = world();
        s.agents[0].food = 0;
        s.agents[0].health = 1;
        let ev = tick(&mut s, 10);
        assert!(!s.agents[0].alive);
        assert_eq!(s.agents[0].health, 0);
        assert_eq!(ev, vec![Event::AgentDied { agent: 0 }]);
    }

    #[test]
    fn regeneration_when_fed() {
        let mut s = world();
        s.agents[0].health = 5;
        tick(&mut s, 10);
        assert_eq!(s.agents[0].health, 6);
    }

    #[test]
    fn sleep_restores_energy_and_wakes() {
        let mut s = world();
        s.agents[0].energy = 8;
        s.agents[0].sleeping = true;
        let ev = tick(&mut s, 20);
        assert_eq!(s.agents[0].energy, 10);
        assert!(!s.agents[0].sleeping);
        assert_eq!(ev, vec![Event::WakeUp { agent: 0, floor: 0 }]);
    }

    #[test]
    fn energy_only_decays_at_night_when_exposed() {
        let mut s = world();
        tick(&mut s, 60);
        assert_eq!(s.agents[0].energy, 10);
        s.time = 150;
        tick(&mut s, 30);
        assert_eq!(s.agents[0].energy, 9);
        for d in Direction::ALL {
            let p = s.agents[0].pos.step(d);
            s.floors[0].set(p, TileKind::Stone);
        }
        tick(&mut s, 60);
        assert_eq!(s.agents[0].energy, 9);
    }

    #[test]
    fn dead_agents_are_frozen() {
        let mut s = world();
        s.agents[0].alive = false;
        s.agents[0].health = 0;
        let before = s.agents[0].clone();
        let ev = tick(&mut s, 100);
        assert_eq!(s.agents[0], before);
        assert!(ev.is_empty());
    }

    #[test]
    fn termination_rules() {
        let mut s = world();
        assert_eq!(check_termination(&s, 100), Termination::default());
        s.time = 100;
        assert_eq!(
            check_termination(&s, 100),
            Termination {
                done: true,
                truncated: true
            }
        );
        s.time = 3;
        s.agents[0].alive = false;
        assert_eq!(
            check_termination(&s, 100),
            Termination {
                done: true,
                truncated: false
            }
        );
    }
}
