use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use hemi::comparison::{verify_scalar_properties, ComparisonProfile};
use hemi::construction::{consistency_m, MultiplesKernel};
use hemi::instances::Euclidean;
use hemi::models::{merge_grid, ModelSpec};
use hemi::par::{with_exec, Exec};
use hemi::Sample;

const MODES: [(&str, Exec); 2] = [("parallel", Exec::Parallel), ("sequential", Exec::Sequential)];

fn consistency(c: &mut Criterion) {
    let mut g = c.benchmark_group("consistency_m");
    let kernel = MultiplesKernel::MinPower { scale: 1.0, alpha: 2.0 };
    let relations = MultiplesKernel::lattice(128);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, 128), |b| {
            b.iter(|| with_exec(mode, || consistency_m(black_box(&kernel), &relations, 128).unwrap()))
        });
    }
    g.finish();
}

fn scalar_properties(c: &mut Criterion) {
    let mut g = c.benchmark_group("scalar_properties");
    let s = Euclidean::new(4).unwrap();
    let p = ComparisonProfile::closed_form(&s).unwrap();
    let sample = Sample::draw(&s, 2_000, 1).unwrap();
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, 2_000), |b| {
            b.iter(|| with_exec(mode, || verify_scalar_properties(&s, &p, black_box(&sample), Some(-1.0))))
        });
    }
    g.finish();
}

fn merge_law_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("merge_grid");
    g.sample_size(10);
    let model = ModelSpec::gaussian(1.0, 1).unwrap();
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "3x3x4"), |b| {
            b.iter(|| with_exec(mode, || merge_grid(&model, &[1.0, 2.0, 3.0], 2_000, 0.01, 4, 5).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, consistency, scalar_properties, merge_law_grid);
criterion_main!(benches);
