use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use weakderiv::admissibility::{falsify, Mode};
use weakderiv::distributions::Mollified;
use weakderiv::families::{explicit_family, standard_battery, verify_weak_derivative};
use weakderiv::numerics::{GridSpec, Side};
use weakderiv::transport::{VelocityRepresentative, DEFAULT_LADDER};
use weakderiv::{Mollifier, RadonMeasure, StructuredDistribution, SupportSet};

fn mollifier_derivatives(c: &mut Criterion) {
    let m = Mollifier::new(0.5).unwrap();
    let mut group = c.benchmark_group("mollifier_derivative");
    for k in [0usize, 2, 6] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| {
                let mut acc = 0.0;
                for i in 0..1000 {
                    acc += m.derivative(black_box(-1.0 + i as f64 * 2e-3), k).unwrap();
                }
                acc
            })
        });
    }
    group.finish();
}

fn convolution(c: &mut Criterion) {
    let psi = Mollifier::new(0.5).unwrap().scaled(0.05).unwrap();
    let eta = StructuredDistribution::new(
        [weakderiv::Atom::new(0.0, 2, 1.0), weakderiv::Atom::new(0.3, 1, -0.5)],
        [weakderiv::DensityPiece::uniform(-0.5, 0.5, 1.0).unwrap()],
    )
    .unwrap();
    let spec = GridSpec::new(-0.6, 0.6, 20_001).unwrap();
    c.bench_function("mollified_sample_20k", |b| {
        b.iter(|| Mollified::new(&psi, &eta).unwrap().sample(black_box(&spec)).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let support = SupportSet::point(0.0);
    // admissible: the oracle spends its whole budget
    let eta = StructuredDistribution::new(
        [weakderiv::Atom::new(0.0, 1, -1.7), weakderiv::Atom::new(0.0, 2, 0.8)],
        [],
    )
    .unwrap();
    c.bench_function("falsify_budget_10k", |b| {
        b.iter(|| falsify(&support, black_box(&eta), Mode::OneSided, 10_000, 0))
    });
}

fn velocity(c: &mut Criterion) {
    let psi = Mollifier::new(0.5).unwrap();
    let mu = RadonMeasure::dirac(0.0);
    let eta = StructuredDistribution::atom(0.0, 1, -1.0);
    let mut group = c.benchmark_group("velocity");
    group.sample_size(10);
    group.bench_function("point_mass_default_ladder", |b| {
        b.iter(|| VelocityRepresentative::build(&mu, &eta, &psi, &DEFAULT_LADDER).unwrap())
    });
    group.finish();
}

fn weak_derivative(c: &mut Criterion) {
    let fam = explicit_family(2, 0.5, Mollifier::new(0.5).unwrap()).unwrap();
    let fns: Vec<_> = standard_battery().into_iter().map(|b| b.f).collect();
    let mut group = c.benchmark_group("weak_derivative");
    group.sample_size(10);
    group.bench_function("explicit_k2_battery", |b| b.iter(|| verify_weak_derivative(&fam, &fns, Side::Right).unwrap()));
    group.finish();
}

criterion_group!(benches, mollifier_derivatives, convolution, oracle, velocity, weak_derivative);
criterion_main!(benches);
