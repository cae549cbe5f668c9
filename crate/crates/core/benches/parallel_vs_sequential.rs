use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use repsel_core::select::{brute_force_with_cap, DEFAULT_ENUMERATION_CAP};
use repsel_core::synthetic::fixture_year;
use repsel_core::{build_matrix, build_matrix_with, Execution, NormalizeMethod, SliceGeometry};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn distance_matrix(c: &mut Criterion) {
    let series = fixture_year().normalize(NormalizeMethod::MinMax).unwrap();
    let mut group = c.benchmark_group("distance_matrix");
    group.sample_size(20);
    for days in [1usize, 3, 5] {
        let g = SliceGeometry::days(series.hours(), days).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, format!("{days}d")), &g, |b, g| {
                b.iter(|| build_matrix_with(black_box(&series), g, exec).unwrap());
            });
        }
    }
    group.finish();
}

// C(60, 3) = 34220 subsets scored per iteration.
fn enumeration(c: &mut Criterion) {
    let series = fixture_year()
        .truncate(60 * 24)
        .unwrap()
        .normalize(NormalizeMethod::MinMax)
        .unwrap();
    let d = build_matrix(&series, &SliceGeometry::days(series.hours(), 1).unwrap()).unwrap();
    let mut group = c.benchmark_group("brute_force_k3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                brute_force_with_cap(black_box(&d), 3, DEFAULT_ENUMERATION_CAP, exec).unwrap()
            });
        });
    }
    group.finish();
}

criterion_group!(benches, distance_matrix, enumeration);
criterion_main!(benches);
