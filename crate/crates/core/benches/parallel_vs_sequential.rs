use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use torhyp::casebook::{conic_pencil, p2, p3};
use torhyp::config::{build_configuration, enumerate_hyperplanes};
use torhyp::deformation::exception_set;
use torhyp::exec::{set_execution, Execution};
use torhyp::field::GaussianRational as G;
use torhyp::hyperbolicity::certify_embedding;
use torhyp::laurent::CoefficientVector;

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn hyperplanes(c: &mut Criterion) {
    let pts = p3(3).lattice_points();
    let cfg = build_configuration(&pts, 3).unwrap();
    let mut group = c.benchmark_group("cubic_surface_hyperplanes");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            set_execution(mode);
            b.iter(|| enumerate_hyperplanes(black_box(&cfg)).unwrap().len())
        });
    }
    group.finish();
}

fn certification(c: &mut Criterion) {
    let p = p2(3);
    let pts = p.lattice_points();
    // distinct small coefficients keep the vector generic
    let a = CoefficientVector::from_pairs(2, &(), pts.iter().enumerate().map(|(k, q)| (q.clone(), G::from_i64(k as i64 + 2))))
        .unwrap();
    let mut group = c.benchmark_group("plane_cubic_certificate");
    group.sample_size(10);
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            set_execution(mode);
            b.iter(|| certify_embedding(black_box(&p), black_box(&a), 1).unwrap())
        });
    }
    group.finish();
}

fn exceptions(c: &mut Criterion) {
    let p = p2(2);
    let pencil = conic_pencil(1, 2);
    let mut group = c.benchmark_group("conic_pencil_exceptions");
    for (name, mode) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            set_execution(mode);
            b.iter(|| exception_set(black_box(&p), black_box(&pencil)).unwrap().count_with_multiplicity)
        });
    }
    group.finish();
}

criterion_group!(benches, hyperplanes, certification, exceptions);
criterion_main!(benches);
