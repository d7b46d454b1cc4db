use criterion::{black_box, criterion_group, criterion_main, Criterion};

use cellcov_core::special::{hyp2f1_1b, omega1, omega2};

fn bench_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("hyp2f1_1b");
    // one argument per evaluation branch
    for (label, b, x) in [
        ("defining_series", 0.5, 0.3),
        ("pfaff", 0.5, 4.0),
        ("large_x", 0.5, 1e6),
        ("large_x_near_one", 0.99, 1e6),
        ("large_x_reduced", 1.6, 1e6),
    ] {
        group.bench_function(label, |bench| {
            bench.iter(|| hyp2f1_1b(black_box(b), black_box(x)))
        });
    }
    group.finish();
}

fn bench_omegas(c: &mut Criterion) {
    c.bench_function("omega1(tau=1, alpha=4)", |b| {
        b.iter(|| omega1(black_box(1.0), black_box(4.0)))
    });
    c.bench_function("omega2(1e4, alpha=1.5)", |b| {
        b.iter(|| omega2(black_box(1e4), black_box(1.5)))
    });
}

criterion_group!(benches, bench_kernel, bench_omegas);
criterion_main!(benches);
