use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use multact_core::actions::{character, rotation_by, Action};
use multact_core::linforms::{Grid2D, LinearForm};
use multact_core::multfn::MultiplicativeFunctionSpec as S;
use multact_core::numtheory::progression_factorize;
use multact_core::par;
use multact_core::uniformity::{gowers_norm, PeriodizedSequence};

fn pools() -> Vec<(&'static str, usize)> {
    vec![("sequential", 1), ("pool", par::current_threads())]
}

fn bench_grid(c: &mut Criterion) {
    let act = Action::Fg(rotation_by(&S::Liouville.compile().unwrap()).unwrap());
    let x = character(2, 1);
    let forms = [
        LinearForm::m(),
        LinearForm::n(),
        LinearForm::new(1, 1).unwrap(),
        LinearForm::new(1, 2).unwrap(),
    ];
    let mut g = c.benchmark_group("multilinear_average_n1000");
    g.sample_size(10);
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::with_threads(threads, || {
                    multact_core::averages::multilinear_average(&[&act; 4], &[&x; 4], &forms, &Grid2D::full(), 1000)
                        .unwrap()
                })
            })
        });
    }
    g.finish();
}

fn bench_progression(c: &mut Criterion) {
    let mut g = c.benchmark_group("progression_factorize_1e5");
    g.sample_size(10);
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                par::with_threads(threads, || {
                    progression_factorize(black_box(1_000_003), 1, 100_000, None).unwrap()
                })
            })
        });
    }
    g.finish();
}

fn bench_gowers(c: &mut Criterion) {
    let seq = PeriodizedSequence::from_real((0..512).map(|i| ((i * i) % 7) as f64 - 3.0)).unwrap();
    let mut g = c.benchmark_group("gowers_u3_n512");
    g.sample_size(10);
    for (name, threads) in pools() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || gowers_norm(black_box(&seq), 3).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_grid, bench_progression, bench_gowers);
criterion_main!(benches);
