//! Per-step cost of the windowed optimizer against Adam across dimensions.
//!
//! `cargo bench -p dwmgrad-bench` — throughput is elements per second, so
//! flat lines across dimensions mean linear step cost.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use dwmgrad::optim::{Adam, AdamConfig, DwmGrad, DwmGradConfig, Optimizer, StepInput};
use dwmgrad_bench::{fixed_gradient, start_params};

fn bench_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    group.sample_size(20);
    for dimension in [10_000usize, 100_000] {
        let gradient = fixed_gradient(dimension, dimension as u64);
        group.throughput(Throughput::Elements(dimension as u64));

        group.bench_with_input(
            BenchmarkId::new("dwmgrad", dimension),
            &dimension,
            |b, &d| {
                let mut optimizer = DwmGrad::new(DwmGradConfig::default(), d).unwrap();
                let mut params = start_params(d);
                let mut step = 0u64;
                b.iter(|| {
                    step += 1;
                    optimizer
                        .step(
                            &mut params,
                            StepInput {
                                gradient: &gradient,
                                loss: 1.0 / step as f64,
                            },
                        )
                        .unwrap()
                });
            },
        );

        group.bench_with_input(BenchmarkId::new("adam", dimension), &dimension, |b, &d| {
            let mut optimizer = Adam::new(AdamConfig::default(), d).unwrap();
            let mut params = start_params(d);
            let mut step = 0u64;
            b.iter(|| {
                step += 1;
                optimizer
                    .step(
                        &mut params,
                        StepInput {
                            gradient: &gradient,
                            loss: 1.0 / step as f64,
                        },
                    )
                    .unwrap()
            });
        });
    }
    group.finish();
}

criterion_group!(benches, bench_steps);
criterion_main!(benches);
