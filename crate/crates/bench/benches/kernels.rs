use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use lamina_core::brownian_map::MapMetricSample;
use lamina_core::circle_tree::build_circle_tree;
use lamina_core::estimators::{box_count_segments, dyadic_scales, lamination_segments};
use lamina_core::excursion::sample_dyck_excursion;
use lamina_core::lamination::build_lamination;
use lamina_core::planar_maps::{bfs_distances, bottleneck_scan, sample_quadrangulation};
use lamina_core::snake::{reroot, sample_labels, IncrementLaw};
use lamina_core::{Coding, RmqIndex};

fn trees(c: &mut Criterion) {
    c.bench_function("dyck excursion n=2^16", |b| {
        b.iter(|| sample_dyck_excursion(black_box(1 << 16), 1).unwrap())
    });
    let e = sample_dyck_excursion(1 << 16, 1).unwrap();
    c.bench_function("circle tree n=2^16", |b| {
        b.iter(|| build_circle_tree(black_box(&e)))
    });
    c.bench_function("sparse table n=2^16", |b| {
        b.iter(|| RmqIndex::new(black_box(e.heights())))
    });
    let idx = e.index();
    let coding = e.coding(&idx);
    c.bench_function("d_g 1000 queries", |b| {
        b.iter(|| {
            (0..1000)
                .map(|i| coding.d(i * 97 % e.period(), i * 31 % e.period()))
                .sum::<i64>()
        })
    });
    let tree = build_circle_tree(&e);
    c.bench_function("labels n=2^16", |b| {
        b.iter(|| sample_labels(&tree, IncrementLaw::Uniform3, black_box(2)).unwrap())
    });
}

fn laminations(c: &mut Criterion) {
    let tree = build_circle_tree(&sample_dyck_excursion(1 << 16, 3).unwrap());
    let lam = build_lamination(&tree);
    let segments = lamination_segments(&lam);
    let scales = dyadic_scales(3..=9);
    c.bench_function("box count lamination n=2^16", |b| {
        b.iter(|| box_count_segments(black_box(&segments), &scales).unwrap())
    });
}

fn maps(c: &mut Criterion) {
    c.bench_function("quadrangulation n=10^4", |b| {
        b.iter(|| sample_quadrangulation(black_box(10_000), 4).unwrap())
    });
    let m = sample_quadrangulation(10_000, 4).unwrap().map;
    c.bench_function("bfs n=10^4", |b| b.iter(|| bfs_distances(&m, black_box(0))));
    let small = sample_quadrangulation(1000, 5).unwrap().map;
    let mut group = c.benchmark_group("bottleneck");
    group.sample_size(10);
    group.bench_function("scan n=10^3", |b| {
        b.iter(|| bottleneck_scan(&small, 0.3, 4).unwrap())
    });
    group.finish();
}

fn brownian(c: &mut Criterion) {
    let e = sample_dyck_excursion(4096, 6).unwrap();
    let z = sample_labels(&build_circle_tree(&e), IncrementLaw::Uniform3, 6).unwrap();
    let zbar = reroot(&e, &z).unwrap().z_bar;
    c.bench_function("D* row N=500", |b| {
        b.iter_batched(
            || MapMetricSample::stratified(zbar.clone(), 500, 6).unwrap(),
            |s| s.d_star_row(0).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, trees, laminations, maps, brownian);
criterion_main!(benches);
