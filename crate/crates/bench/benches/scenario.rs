use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use nsma_core::comparison::{
    claims_check, comparison_verdict_with, hypotheses_check, ClaimsConfig, Grid, Scenario,
    StauLattice,
};

fn bench_comparison(c: &mut Criterion) {
    let scenario = Scenario::bundled_disk();
    let grid = Grid::build(&scenario.domain, 0.1, 128).expect("grid builds");
    let cfg = ClaimsConfig {
        lattice: StauLattice::uniform(5, 5),
        xi_samples: 64,
        seed: 0x5eed,
    };

    let mut group = c.benchmark_group("comparison");
    group.sample_size(20);
    group.bench_function("hypotheses", |b| {
        b.iter(|| hypotheses_check(black_box(&scenario), black_box(&grid)))
    });
    group.bench_function("claims_5x5", |b| {
        b.iter(|| claims_check(black_box(&scenario), black_box(&grid), &cfg).unwrap())
    });
    group.bench_function("full_verdict", |b| {
        b.iter(|| comparison_verdict_with(black_box(&scenario), black_box(&grid), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_comparison);
criterion_main!(benches);
