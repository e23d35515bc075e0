use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use rswlab_core::estimators::{estimate_pi, McSettings};
use rswlab_core::par::Execution;
use rswlab_core::samplers::{Bernoulli, FieldSampler, IsingCftp};
use rswlab_core::{LatticeSpec, Quad};

fn replicas(c: &mut Criterion) {
    let uj = LatticeSpec::union_jack();
    let q = Quad::rectangle(uj, 32, 36).unwrap();
    let coin = Bernoulli::new(0.5).unwrap();
    let ising = IsingCftp::new(uj, -0.01, 0.01, 14).unwrap();
    let models: [(&str, &dyn FieldSampler, usize); 2] = [("bernoulli", &coin, 2_000), ("ising", &ising, 200)];

    let mut group = c.benchmark_group("estimate_pi_R32x36");
    group.sample_size(10);
    for (name, sampler, reps) in models {
        for exec in [Execution::Parallel, Execution::Sequential] {
            let s = McSettings::new(reps, 1).with_exec(exec);
            group.bench_with_input(BenchmarkId::new(name, format!("{exec:?}").to_lowercase()), &s, |b, s| {
                b.iter(|| estimate_pi(sampler, &q, black_box(s)).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, replicas);
criterion_main!(benches);
