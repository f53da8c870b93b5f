use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use schwinger_core::bounds::{bound_groups, empirical_min_steps, exact_commutator_prefactor};
use schwinger_core::dense::conserving_spectral_norm;
use schwinger_core::{
    bare_vacuum, build_model, build_step, compile_step, ModelParams, NativeGate, OrderingScheme, PauliString,
    SchwingerModel,
};

fn model(n: usize) -> SchwingerModel {
    build_model(ModelParams::with_default_couplings(n).unwrap()).unwrap()
}

fn gate_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("gate");
    for n in [8, 12, 16] {
        let mut psi = bare_vacuum(model(n).params()).unwrap();
        let xx = NativeGate::XX { first: 1, second: n - 2, chi: 0.3 };
        g.bench_with_input(BenchmarkId::new("xx", n), &n, |b, _| b.iter(|| psi.apply_native(black_box(&xx)).unwrap()));
        let r = NativeGate::R { qubit: n / 2, theta: 0.7, phi: 1.1 };
        g.bench_with_input(BenchmarkId::new("r", n), &n, |b, _| b.iter(|| psi.apply_native(black_box(&r)).unwrap()));
        let s = PauliString::parse(&"XY".repeat(n / 2)).unwrap();
        g.bench_with_input(BenchmarkId::new("pauli_rotation", n), &n, |b, _| {
            b.iter(|| psi.apply_pauli_rotation(black_box(&s), 0.2).unwrap())
        });
    }
    g.finish();
}

fn step_application(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    for n in [8, 12, 16] {
        let m = model(n);
        let mut psi = bare_vacuum(m.params()).unwrap();
        for o in [OrderingScheme::OE1, OrderingScheme::XYZ] {
            let step = build_step(&m, o, 2, 0.5).unwrap();
            g.bench_with_input(BenchmarkId::new(format!("{o}_p2"), n), &n, |b, _| b.iter(|| step.apply(&mut psi).unwrap()));
        }
        let circuit = compile_step(&m, OrderingScheme::OE1, 0.5).unwrap();
        g.bench_with_input(BenchmarkId::new("compiled_oe1", n), &n, |b, _| b.iter(|| circuit.apply(&mut psi).unwrap()));
    }
    g.finish();
}

fn bounds(c: &mut Criterion) {
    let mut g = c.benchmark_group("bounds");
    g.sample_size(10);
    for n in [6, 10] {
        let m = model(n);
        g.bench_with_input(BenchmarkId::new("sector_norm_h", n), &n, |b, _| {
            b.iter(|| conserving_spectral_norm(black_box(&m.hamiltonian())).unwrap())
        });
        let groups = bound_groups(&m);
        g.bench_with_input(BenchmarkId::new("commutator_prefactor", n), &n, |b, _| {
            b.iter(|| exact_commutator_prefactor(black_box(&groups)).unwrap())
        });
    }
    let m = model(6);
    g.bench_function("empirical_steps_n6", |b| b.iter(|| empirical_min_steps(&m, 2, 6.0, 0.01).unwrap()));
    g.finish();
}

criterion_group!(benches, gate_kernels, step_application, bounds);
criterion_main!(benches);
