use std::time::Duration;

use coopcraft::{BatchEnv, EnvConfig};
use coopcraft_bench::ActionStream;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn batch_step(c: &mut Criterion) {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut g = c.benchmark_group("batch_step");
    g.measurement_time(Duration::from_secs(3));
    for agents in [1, 4] {
        for envs in [1, 64, 512] {
            let cfg = EnvConfig::ma(agents);
            let seeds: Vec<u64> = (0..envs as u64).collect();
            let mut batch = BatchEnv::new(cfg, &seeds, threads).unwrap();
            let mut actions = ActionStream::new(batch.env(0), envs * agents, 9);
            g.throughput(Throughput::Elements((envs * agents) as u64));
            g.bench_with_input(BenchmarkId::new(format!("ma{agents}"), envs), &envs, |b, _| {
                b.iter(|| {
                    batch.step(actions.sample()).unwrap();
                })
            });
        }
    }
    g.finish();
}

criterion_group!(benches, batch_step);
criterion_main!(benches);
