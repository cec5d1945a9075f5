use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use modelset_bench::{fibonacci_sample, fibonacci_window, radii};
use modelset_core::acceptance::{acceptance_domain, extract_patch, verify_acceptance, Region};
use modelset_core::deform::{meyer_report, MeyerThresholds};
use modelset_core::{CutProjectScheme, QuadField, SubstitutionSystem};

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate fibonacci [0, 2000]", |b| b.iter(|| fibonacci_sample(black_box(2000))));
}

fn acceptance(c: &mut Criterion) {
    let f = QuadField::GOLDEN;
    let sample = fibonacci_sample(2000);
    let scheme = CutProjectScheme::fibonacci();
    let patch = extract_patch(&sample, 700, Region::Ball(f.int(5))).unwrap();
    c.bench_function("acceptance domain, radius 5", |b| {
        b.iter(|| acceptance_domain(&scheme, &fibonacci_window(), black_box(&patch)).unwrap())
    });
    let dom = acceptance_domain(&scheme, &fibonacci_window(), &patch).unwrap();
    c.bench_function("verify acceptance on [0, 2000]", |b| b.iter(|| verify_acceptance(&sample, black_box(&dom))));
}

fn meyer(c: &mut Criterion) {
    let sample = fibonacci_sample(1000);
    let r = radii(&[10, 20, 40, 80, 160, 320]);
    c.bench_function("meyer report on [0, 1000]", |b| {
        b.iter(|| meyer_report(black_box(&sample.positions), &r, None, &MeyerThresholds::default()).unwrap())
    });
}

fn substitution(c: &mut Criterion) {
    let sys = SubstitutionSystem::doubled_fibonacci();
    let natural = sys.natural_lengths().unwrap();
    c.bench_function("eigen system", |b| b.iter(|| black_box(&sys).eigen_system().unwrap()));
    c.bench_function("realize generation 9", |b| b.iter(|| sys.realize(0, black_box(9), &natural, &[0, 1, 2, 3]).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = enumeration, acceptance, meyer, substitution
}
criterion_main!(benches);
