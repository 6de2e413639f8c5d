use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use gpmetric::check::{run_suite, CheckConfig};
use gpmetric::exec::Exec;

fn suites(c: &mut Criterion) {
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for suite in ["ultranorm", "words", "embed"] {
        for (label, exec) in [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)] {
            let cfg = CheckConfig {
                samples: 100,
                exec,
                ..CheckConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(suite, label), &cfg, |b, cfg| {
                b.iter(|| run_suite(suite, cfg).expect("known suite"))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
