use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cellcov_bench::{dspm_config, mspm_config, sspm_config};
use cellcov_core::analytic::{cp_bounds_mspm, cp_dspm, cp_mspm, cp_sspm};
use cellcov_core::density::critical_density_numeric;

fn bench_coverage(c: &mut Criterion) {
    let sspm = sspm_config(1e-3, 8.5);
    c.bench_function("cp_sspm", |b| b.iter(|| cp_sspm(black_box(&sspm)).unwrap()));

    let dspm = dspm_config(1e-3, 8.5);
    c.bench_function("cp_dspm", |b| b.iter(|| cp_dspm(black_box(&dspm)).unwrap()));

    let mspm = mspm_config(1e-4, 4.0);
    c.bench_function("cp_mspm_n3", |b| b.iter(|| cp_mspm(black_box(&mspm)).unwrap()));
    c.bench_function("cp_bounds_n3", |b| {
        b.iter(|| cp_bounds_mspm(black_box(&mspm)).unwrap())
    });
}

fn bench_critical(c: &mut Criterion) {
    let mut group = c.benchmark_group("critical_density_numeric");
    group.sample_size(10);
    let model = dspm_config(1e-3, 2.0).model;
    group.bench_function("dspm_unconstrained", |b| {
        b.iter(|| critical_density_numeric(black_box(&model), 2.0, 1.0, None).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_coverage, bench_critical);
criterion_main!(benches);
