use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use routebench_core::exact::{solve_btsp, solve_gtsp, solve_multirobot, solve_tsp};
use routebench_core::instance_io::{derive_variant_instance, generate_random_instance, parse_tsplib};
use routebench_core::{build_distance_matrix, VariantKind};

fn held_karp(c: &mut Criterion) {
    let mut group = c.benchmark_group("held_karp");
    for n in [10, 15, 20] {
        let inst = generate_random_instance(VariantKind::Tsp, n, 0).unwrap();
        let dm = build_distance_matrix(&inst);
        group.bench_with_input(BenchmarkId::new("tsp", n), &dm, |b, dm| b.iter(|| solve_tsp(black_box(dm), 0)));
        group.bench_with_input(BenchmarkId::new("btsp", n), &dm, |b, dm| b.iter(|| solve_btsp(black_box(dm), 0)));
    }
    let inst = generate_random_instance(VariantKind::Gtsp, 20, 0).unwrap();
    let dm = build_distance_matrix(&inst);
    let clusters = inst.variant.clusters.clone().unwrap();
    group.bench_function("gtsp/20", |b| b.iter(|| solve_gtsp(black_box(&dm), 0, &clusters)));
    group.finish();
}

fn multirobot(c: &mut Criterion) {
    let base = parse_tsplib(include_str!("../../../data/cvrplib/P-n16-k8.vrp")).unwrap();
    let mut group = c.benchmark_group("multirobot");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for kind in [VariantKind::Cvrp, VariantKind::Mtsp, VariantKind::MinmaxMtsp] {
        let inst = derive_variant_instance(&base, kind).unwrap();
        group.bench_function(kind.slug(), |b| b.iter(|| solve_multirobot(black_box(&inst))));
    }
    group.finish();
}

criterion_group!(benches, held_karp, multirobot);
criterion_main!(benches);
