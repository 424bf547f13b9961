//! Parallel against sequential execution on the exhaustive checks.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fusion_locality::exec::{self, Mode};
use fusion_locality::fusion::DEFAULT_SUBSYSTEM_CAP;
use fusion_locality::instances::{s4_locality, s5_locality, symmetric_locality};
use fusion_locality::partial;

const MODES: [(&str, Mode); 2] = [("parallel", Mode::Parallel), ("sequential", Mode::Sequential)];

fn validate(c: &mut Criterion) {
    let mut group = c.benchmark_group("validate");
    group.sample_size(10);
    let cases = [("s4_len4", s4_locality(), 4), ("s5_len4", s5_locality(), 4)];
    for (name, l, len) in &cases {
        for (mode_name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(*name, mode_name), len, |b, &len| {
                b.iter(|| exec::with_mode(mode, || l.validate(len)))
            });
        }
    }
    group.finish();
}

fn partial_normals(c: &mut Criterion) {
    let mut group = c.benchmark_group("partial_normals");
    group.sample_size(10);
    let sparse = symmetric_locality(5, 2, 2).unwrap();
    for (mode_name, mode) in MODES {
        group.bench_function(BenchmarkId::new("s5_sparse", mode_name), |b| {
            b.iter(|| exec::with_mode(mode, || partial::enumerate_partial_normals(&sparse).unwrap()))
        });
    }
    group.finish();
}

fn subsystems(c: &mut Criterion) {
    let mut group = c.benchmark_group("subnormal_subsystems");
    group.sample_size(10);
    let f = s4_locality().fusion_system().unwrap();
    for (mode_name, mode) in MODES {
        group.bench_function(BenchmarkId::new("s4", mode_name), |b| {
            b.iter(|| exec::with_mode(mode, || f.subnormal_subsystems(DEFAULT_SUBSYSTEM_CAP)))
        });
    }
    group.finish();
}

criterion_group!(benches, validate, partial_normals, subsystems);
criterion_main!(benches);
