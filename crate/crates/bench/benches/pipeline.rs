use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use finsler_core::curvature::{berwald_parallel_defect, curvature_pack};
use finsler_core::geodesic::{integrate_geodesic, q_along};
use finsler_core::projective::projective_parameter;
use finsler_core::pseudo::{estimate_pseudo_distance, SearchBudget};
use finsler_core::{ModelMetric, TangentSample};

fn zoo() -> Vec<(&'static str, ModelMetric)> {
    vec![
        ("klein", ModelMetric::klein(2)),
        ("funk", ModelMetric::funk(2)),
        ("randers", ModelMetric::randers(2, 0.3)),
        ("klein3", ModelMetric::klein(3)),
    ]
}

fn curvature(c: &mut Criterion) {
    let s = TangentSample::new(vec![0.2, -0.1], vec![0.6, 0.3]);
    let s3 = TangentSample::new(vec![0.2, -0.1, 0.05], vec![0.6, 0.3, -0.2]);
    let mut g = c.benchmark_group("curvature_pack");
    for (name, m) in zoo() {
        let s = if name == "klein3" { &s3 } else { &s };
        g.bench_with_input(BenchmarkId::from_parameter(name), &m, |b, m| {
            b.iter(|| curvature_pack(m, black_box(s)).unwrap())
        });
    }
    g.finish();
    let m = ModelMetric::funk(2);
    c.bench_function("berwald_defect/funk", |b| b.iter(|| berwald_parallel_defect(&m, black_box(&s)).unwrap()));
}

fn geodesics(c: &mut Criterion) {
    let mut g = c.benchmark_group("geodesic_with_q");
    g.sample_size(20);
    for (name, m) in zoo().into_iter().take(3) {
        g.bench_with_input(BenchmarkId::from_parameter(name), &m, |b, m| {
            b.iter(|| {
                let path = integrate_geodesic(m, &[0.1, 0.0], &[0.0, 1.0], 2.0, 1e-3).unwrap();
                q_along(m, path).unwrap()
            })
        });
    }
    g.finish();
    let m = ModelMetric::sphere(2);
    let path = q_along(&m, integrate_geodesic(&m, &[0.0, 0.0], &[1.0, 0.0], 2.5, 1e-3).unwrap()).unwrap();
    c.bench_function("projective_parameter/sphere", |b| b.iter(|| projective_parameter(black_box(&path)).unwrap()));
}

fn pseudo(c: &mut Criterion) {
    let budget = SearchBudget::default();
    let mut g = c.benchmark_group("estimate_pseudo_distance");
    g.sample_size(10);
    for (name, m, x, y) in [
        ("euclidean", ModelMetric::euclidean(2), [0.0, 0.0], [1.0, 2.0]),
        ("klein", ModelMetric::klein(2), [0.1, 0.0], [-0.3, 0.4]),
        ("funk", ModelMetric::funk(2), [0.1, 0.0], [-0.2, 0.3]),
    ] {
        g.bench_function(name, |b| b.iter(|| estimate_pseudo_distance(&m, &x, &y, &budget).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, curvature, geodesics, pseudo);
criterion_main!(benches);
