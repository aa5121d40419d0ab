use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use darboux_core::catalog::example;
use darboux_core::field::linspace;
use darboux_core::grid::{map_grid, map_grid_seq};

fn transformed_potential(c: &mut Criterion) {
    let mut group = c.benchmark_group("transformed-q");
    for name in ["ex1", "ex2", "ex11"] {
        let b = example(name).expect("catalog example");
        let iv = b.interval;
        let xs = linspace(iv.lo, iv.hi, 2001);
        let q = b.computed.q().clone();
        group.bench_with_input(BenchmarkId::new("parallel", name), &xs, |bench, xs| {
            bench.iter(|| map_grid(xs, |x| q.value(x).unwrap_or(f64::NAN)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", name), &xs, |bench, xs| {
            bench.iter(|| map_grid_seq(xs, |x| q.value(x).unwrap_or(f64::NAN)))
        });
    }
    group.finish();
}

criterion_group!(benches, transformed_potential);
criterion_main!(benches);
