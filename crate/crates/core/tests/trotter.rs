mod common;

use std::f64::consts::PI;

use common::*;
use schwinger_core::dense::{matrix_spectral_norm, to_dense};
use schwinger_core::observables::state_leakage;
use schwinger_core::trotter::{
    optimize_alpha1, protected_leakage, protected_step_unitary, Generator, Protection,
};
use schwinger_core::{
    bare_vacuum, build_model, build_step, evolve, Hopping, ModelParams, OrderingScheme, TrotterPlan,
};

/// `exp(−i·time·G)` for one factor, from its Pauli expansion.
fn factor_matrix(n: usize, g: &Generator, time: f64) -> M {
    expm_i(&to_dense(&g.to_term_sum(n)).unwrap().into_matrix(), time)
}

fn literal_product(n: usize, step: &schwinger_core::StepSequence) -> M {
    step.factors()
        .iter()
        .fold(identity(n), |acc, f| factor_matrix(n, &f.generator, f.time) * acc)
}

#[test]
fn step_unitaries_equal_the_literal_factor_products() {
    for (n, o, p) in [
        (4, OrderingScheme::XYZ, 1),
        (4, OrderingScheme::OE1, 2),
        (6, OrderingScheme::OE2, 1),
        (4, OrderingScheme::OE2, 4),
    ] {
        let m = model(n);
        let step = build_step(&m, o, p, 1.0).unwrap();
        let u = step.unitary().unwrap().into_matrix();
        assert!(max_abs(&(u - literal_product(n, &step))) < 1e-12, "N={n} {o} p={p}");
    }
}

#[test]
fn xyz_factor_order_is_xx_then_yy_then_diagonal() {
    let m = model(4);
    let step = build_step(&m, OrderingScheme::XYZ, 1, 1.0).unwrap();
    let labels: Vec<String> = step
        .factors()
        .iter()
        .map(|f| match &f.generator {
            Generator::Pauli { string, .. } => string.to_string(),
            Generator::Diagonal { .. } => "diag".into(),
            Generator::Hopping { .. } => "hop".into(),
        })
        .collect();
    assert_eq!(labels, ["XXII", "IXXI", "IIXX", "YYII", "IYYI", "IIYY", "diag"]);
}

#[test]
fn oe2_interleaves_nearest_neighbour_zz() {
    let step = build_step(&model(4), OrderingScheme::OE2, 1, 1.0).unwrap();
    let labels: Vec<String> = step
        .factors()
        .iter()
        .map(|f| match &f.generator {
            Generator::Pauli { string, .. } => string.to_string(),
            Generator::Diagonal { .. } => "diag".into(),
            Generator::Hopping { left, .. } => format!("hop{left}"),
        })
        .collect();
    // the (3,4) pair has zero coefficient at N=4 and is skipped
    assert_eq!(labels, ["hop0", "ZZII", "hop2", "hop1", "IZZI", "diag"]);
}

#[test]
fn small_steps_approach_identity_linearly() {
    let m = model(4);
    let dev = |dt: f64| {
        let u = build_step(&m, OrderingScheme::XYZ, 1, dt).unwrap().unitary().unwrap().into_matrix();
        matrix_spectral_norm(&(u - identity(4))).unwrap()
    };
    let ratio = dev(1e-3) / dev(5e-4);
    assert!((ratio - 2.0).abs() < 1e-2, "ratio {ratio}");
}

#[test]
fn second_order_is_time_symmetric() {
    let m = model(4);
    for o in [OrderingScheme::OE1, OrderingScheme::XYZ, OrderingScheme::OE2] {
        let f = build_step(&m, o, 2, 0.4).unwrap().unitary().unwrap().into_matrix();
        let b = build_step(&m, o, 2, -0.4).unwrap().unitary().unwrap().into_matrix();
        assert!(max_abs(&(f * b - identity(4))) < 1e-10);
    }
}

#[test]
fn global_error_shrinks_as_steps_double() {
    let m = model(4);
    let h = to_dense(&m.hamiltonian()).unwrap().into_matrix();
    let t = 2.0;
    let u = expm_i(&h, t);
    for p in [1, 2] {
        let mut last = f64::INFINITY;
        for r in [4, 8, 16, 32] {
            let s = build_step(&m, OrderingScheme::OE1, p, t / r as f64).unwrap().unitary().unwrap().into_matrix();
            let sr = (0..r).fold(identity(4), |acc, _| &s * acc);
            let err = matrix_spectral_norm(&(&u - sr)).unwrap();
            assert!(err < last, "p={p} r={r}");
            last = err;
        }
    }
}

#[test]
fn suzuki_orders_converge_at_their_rate() {
    let m = model(4);
    let h = to_dense(&m.hamiltonian()).unwrap().into_matrix();
    for (p, expected) in [(1usize, 2.0f64), (2, 3.0), (4, 5.0)] {
        let err = |dt: f64| {
            let s = build_step(&m, OrderingScheme::XYZ, p, dt).unwrap().unitary().unwrap().into_matrix();
            matrix_spectral_norm(&(expm_i(&h, dt) - s)).unwrap()
        };
        let slope = (err(0.1) / err(0.05)).log2();
        assert!((slope - expected).abs() < 0.3, "p={p} slope {slope}");
    }
}

#[test]
fn odd_even_orderings_never_leak() {
    for n in [2, 4, 6] {
        let m = model(n);
        let psi0 = bare_vacuum(m.params()).unwrap();
        for o in [OrderingScheme::OE1, OrderingScheme::OE2] {
            for dt in [0.1, 0.77, 2.3] {
                let traj = evolve(&m, &psi0, &TrotterPlan::new(o, 1, dt, 8)).unwrap();
                assert!(traj.iter().all(|s| state_leakage(s, 0) < 1e-12));
            }
        }
    }
}

#[test]
fn xyz_leaks_at_six_sites() {
    let m = model(6);
    let psi0 = bare_vacuum(m.params()).unwrap();
    let traj = evolve(&m, &psi0, &TrotterPlan::new(OrderingScheme::XYZ, 1, 0.5, 6)).unwrap();
    assert!(traj[1..].iter().all(|s| state_leakage(s, 0) > 0.0));
}

#[test]
fn zero_angles_change_nothing() {
    let m = model(4);
    let psi0 = bare_vacuum(m.params()).unwrap();
    let plan = TrotterPlan::new(OrderingScheme::XYZ, 1, 1.0, 3);
    let a = evolve(&m, &psi0, &plan).unwrap();
    let b = evolve(&m, &psi0, &plan.clone().with_protection(Protection::Angles(vec![0.0; 3]))).unwrap();
    assert_eq!(a, b);
}

#[test]
fn protection_matters_for_xyz() {
    let m = model(4);
    let step = build_step(&m, OrderingScheme::XYZ, 1, 1.0).unwrap();
    let plain = step.unitary().unwrap().into_matrix();
    let prot = protected_step_unitary(&step, 1.0).unwrap().into_matrix();
    assert!(max_abs(&(plain - prot)) > 1e-3);
}

#[test]
fn replayed_random_schedule_from_json() {
    // a hand-supplied two-step schedule, radians
    let json = r#"{"ordering":"xyz","p":1,"dt":1.0,"steps":2,"protection":[3.6005,0.9384]}"#;
    let plan: TrotterPlan = serde_json::from_str(json).unwrap();
    let angles = plan.angles().unwrap().unwrap();
    assert_eq!(angles, vec![3.6005, 0.9384]);
    let m = model(4);
    let psi0 = bare_vacuum(m.params()).unwrap();
    let traj = evolve(&m, &psi0, &plan).unwrap();
    let step = build_step(&m, OrderingScheme::XYZ, 1, 1.0).unwrap();
    let direct = protected_leakage(&step, 2, &angles).unwrap();
    assert!((state_leakage(&traj[2], 0) - direct).abs() < 1e-14);
}

#[test]
fn first_step_leakage_does_not_depend_on_alpha() {
    let params = ModelParams::new(4, 0.6, 0.1).unwrap().with_hopping(Hopping::Ladder);
    let m = build_model(params).unwrap();
    let opt = optimize_alpha1(&m, OrderingScheme::XYZ, 1.0, 1.0, 1024).unwrap();
    assert_eq!(opt.alpha1, 0.0);
    assert!((opt.leakage - 0.0346).abs() < 1e-3);
}

#[test]
fn sweep_minima_are_reported_in_angle_order() {
    let params = ModelParams::new(4, 0.6, 0.1).unwrap().with_hopping(Hopping::Ladder);
    let m = build_model(params).unwrap();
    let opt = optimize_alpha1(&m, OrderingScheme::XYZ, 1.0, 4.0, 2048).unwrap();
    assert!(opt.local_minima.len() >= 2);
    assert!(opt.local_minima.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(opt.local_minima.iter().all(|&(a, l)| (0.0..2.0 * PI).contains(&a) && l >= opt.leakage - 1e-9));
}

#[test]
fn non_integral_horizon_is_rejected() {
    let m = model(4);
    assert!(optimize_alpha1(&m, OrderingScheme::XYZ, 0.3, 1.0, 1024).is_err());
}
