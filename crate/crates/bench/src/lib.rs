//! Fixtures shared by the benchmarks.

use coopcraft::{ActionId, Env, EnvConfig, RngState};

/// Configs benchmarked for single-environment costs.
pub fn configs() -> Vec<(&'static str, EnvConfig)> {
    vec![
        ("ma1", EnvConfig::ma(1)),
        ("ma4", EnvConfig::ma(4)),
        ("coop", EnvConfig::coop()),
    ]
}

/// Uniform random joint actions, reproducible per seed.
pub struct ActionStream {
    rng: RngState,
    n_actions: u32,
    buf: Vec<ActionId>,
}

impl ActionStream {
    pub fn new(env: &Env, width: usize, seed: u64) -> Self {
        Self {
            rng: RngState::new(seed),
            n_actions: env.action_space().len() as u32,
            buf: vec![ActionId(0); width],
        }
    }

    pub fn sample(&mut self) -> &[ActionId] {
        for a in self.buf.iter_mut() {
            *a = ActionId(self.rng.below(self.n_actions) as u16);
        }
        &self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn actions_in_range() {
        let env = Env::new(EnvConfig::coop(), 0).unwrap();
        let mut s = ActionStream::new(&env, 3, 1);
        for _ in 0..100 {
            assert!(s.sample().iter().all(|a| (a.0 as usize) < env.action_space().len()));
        }
    }
}
