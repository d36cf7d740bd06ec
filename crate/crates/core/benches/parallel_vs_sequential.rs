use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use superdirective::composite::{CompositeArray, CompositePattern, LineAxis};
use superdirective::geometry::{make_uca, CarrierContext, Direction};
use superdirective::metrics::{
    compute_a_with, sample_pattern, GridResolution, QuadratureSpec, WeightVector,
};
use superdirective::par::Execution;
use superdirective::sweep::{run_sweep, SweepPoint};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn composite() -> CompositeArray {
    let sub = make_uca(5, 3.0, 0.0).unwrap();
    CompositeArray::new(sub, WeightVector::uniform(5), 8, 15.0, LineAxis::Y).unwrap()
}

fn noise_matrix(c: &mut Criterion) {
    let (array, _) = composite().flatten();
    let ctx = CarrierContext::from_mhz(4.0).unwrap();
    let quad = QuadratureSpec::default();
    let mut g = c.benchmark_group("noise_matrix_40_sensors");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| compute_a_with(black_box(&array), &ctx, &quad, exec).unwrap())
        });
    }
    g.finish();
}

fn pattern_grid(c: &mut Criterion) {
    let ctx = CarrierContext::from_mhz(4.0).unwrap();
    let total = CompositePattern::new(&composite(), &ctx);
    let res = GridResolution::degrees(1.0);
    let mut g = c.benchmark_group("pattern_grid_1deg");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample_pattern(black_box(&total), res, exec))
        });
    }
    g.finish();
}

fn radius_sweep(c: &mut Criterion) {
    let lambda = CarrierContext::from_mhz(4.0).unwrap().wavelength();
    let points: Vec<SweepPoint> = [3usize, 5, 7]
        .iter()
        .flat_map(|&n| {
            [0.02, 0.05, 0.1, 0.2, 0.3].map(|r| SweepPoint {
                n,
                radius_m: r * lambda,
                f_mhz: 4.0,
            })
        })
        .collect();
    let look = Direction::horizontal(0.0);
    let quad = QuadratureSpec::default();
    let mut g = c.benchmark_group("sweep_15_points");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run_sweep(black_box(&points), &look, &quad, exec))
        });
    }
    g.finish();
}

criterion_group!(benches, noise_matrix, pattern_grid, radius_sweep);
criterion_main!(benches);
