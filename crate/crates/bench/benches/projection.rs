use std::hint::black_box;

use attractor_bench::{cut_cube, point};
use attractor_core::ConvexSet;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn projections(c: &mut Criterion) {
    let ball = ConvexSet::ball(point(&[0.0, 0.0, 0.0]), 1.0).unwrap();
    let far = point(&[3.0, -2.0, 1.0]);
    c.bench_function("ball_3d", |b| b.iter(|| ball.project(black_box(&far)).unwrap()));

    let mut group = c.benchmark_group("dykstra_cut_cube");
    for dim in [2, 4, 8] {
        let set = cut_cube(dim);
        let x = point(&vec![2.0; dim]);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &x, |b, x| {
            b.iter(|| set.project(black_box(x)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, projections);
criterion_main!(benches);
