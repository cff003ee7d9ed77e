use acumen_bench::{config, Workload};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate 1 s");
    group.sample_size(20);
    for name in ["bouncing_ball", "example_3", "controlled_example_3", "rod"] {
        let w = Workload::load(name);
        let steps = w.run(config(1.0 / 64.0, 1.0)).steps;
        group.throughput(Throughput::Elements(steps));
        group.bench_with_input(BenchmarkId::from_parameter(name), &w, |b, w| b.iter(|| w.run(config(1.0 / 64.0, 1.0))));
    }
    group.finish();

    let ball = Workload::load("bouncing_ball");
    let mut group = c.benchmark_group("bouncing_ball step size");
    group.sample_size(10);
    for k in [6, 8, 10] {
        let h = 2f64.powi(-k);
        group.bench_with_input(BenchmarkId::from_parameter(format!("2^-{k}")), &h, |b, &h| {
            b.iter(|| ball.run(config(h, 2.0)))
        });
    }
    group.finish();
}

criterion_group!(benches, simulation);
criterion_main!(benches);
