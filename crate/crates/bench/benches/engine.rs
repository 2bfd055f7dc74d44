use std::hint::black_box;

use coopcraft::{Env, EnvConfig};
use coopcraft_bench::{configs, ActionStream};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

fn step(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    for (name, cfg) in configs() {
        let mut env = Env::new(cfg.clone(), 1).unwrap();
        let mut actions = ActionStream::new(&env, cfg.n_agents, 2);
        g.bench_function(name, |b| {
            b.iter(|| {
                let t = env.step_raw(actions.sample()).unwrap();
                if t.done {
                    env.reset(3).unwrap();
                }
                black_box(t.rewards);
            })
        });
    }
    g.finish();
}

fn observe(c: &mut Criterion) {
    let mut g = c.benchmark_group("observe");
    for (name, cfg) in configs() {
        let env = Env::new(cfg, 4).unwrap();
        let mut out = vec![0.0; env.obs_len() * env.n_agents()];
        g.bench_function(name, |b| b.iter(|| env.observe_into(black_box(&mut out))));
    }
    g.finish();
}

fn reset(c: &mut Criterion) {
    let mut g = c.benchmark_group("reset");
    g.sample_size(20);
    for (name, cfg) in configs() {
        let mut seed = 0;
        g.bench_function(name, |b| {
            b.iter_batched(
                || {
                    seed += 1;
                    seed
                },
                |s| Env::new(cfg.clone(), s).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    g.finish();
}

fn state_hash(c: &mut Criterion) {
    let env = Env::new(EnvConfig::coop(), 5).unwrap();
    c.bench_function("state_hash", |b| b.iter(|| black_box(env.state().state_hash())));
}

criterion_group!(benches, step, observe, reset, state_hash);
criterion_main!(benches);
