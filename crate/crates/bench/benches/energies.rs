//! Kernel-level throughput benchmarks. The double integrals dominate every
//! CLI command, so regressions here show up directly in wall-clock time.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tangentpoint::energies::{f_energy, g_energy, tp_energy_at};
use tangentpoint::gaussmap::{fenchel_report, path_length_u};
use tangentpoint::quadrature::{graded_half_nodes, QuadratureSpec};
use tangentpoint::samples::{resample_arclength, sample};
use tangentpoint_bench::{ellipse_samples, trefoil_samples};

fn bench_tp_energy(c: &mut Criterion) {
    let mut group = c.benchmark_group("tp_energy");
    for n in [64usize, 128, 256] {
        let samples = ellipse_samples(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| tp_energy_at(black_box(&samples), 4.0, 2.0, n, 4.0).unwrap());
        });
    }
    group.finish();
}

fn bench_minorants(c: &mut Criterion) {
    let samples = ellipse_samples(128);
    // F integrates along arc length, so it gets resampled input.
    let arc = resample_arclength(&tangentpoint::curves::make_ellipse(2.0, 1.0).unwrap(), 128)
        .unwrap();
    let quad = QuadratureSpec {
        n_u: 128,
        n_w: 128,
        grading_exponent: 4.0,
        doubling_rounds: 1,
        convergence_rtol: 1e-6,
    };
    c.bench_function("g_energy_128", |b| {
        b.iter(|| g_energy(black_box(&samples), 4.0, 2.0, &quad).unwrap());
    });
    c.bench_function("f_energy_128", |b| {
        b.iter(|| f_energy(black_box(&arc), 3.0, 2.0, &quad).unwrap());
    });
}

fn bench_gaussmap(c: &mut Criterion) {
    let samples = trefoil_samples(256);
    c.bench_function("fenchel_report_256", |b| {
        b.iter(|| fenchel_report(black_box(&samples)).unwrap());
    });
    c.bench_function("path_length_u_256", |b| {
        b.iter(|| path_length_u(black_box(&samples), 0.25).unwrap());
    });
}

fn bench_quadrature(c: &mut Criterion) {
    c.bench_function("graded_half_nodes_4096", |b| {
        b.iter(|| graded_half_nodes(black_box(4096), 8.0).unwrap());
    });
}

fn bench_sampling(c: &mut Criterion) {
    let curve = tangentpoint::curves::make_ellipse(2.0, 1.0).unwrap();
    c.bench_function("resample_arclength_512", |b| {
        b.iter(|| resample_arclength(black_box(&curve), 512).unwrap());
    });
    c.bench_function("sample_uniform_512", |b| {
        b.iter(|| sample(black_box(&curve), 512).unwrap());
    });
}

criterion_group!(
    benches,
    bench_tp_energy,
    bench_minorants,
    bench_gaussmap,
    bench_quadrature,
    bench_sampling
);
criterion_main!(benches);
