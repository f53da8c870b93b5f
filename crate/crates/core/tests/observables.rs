mod common;

use std::collections::BTreeMap;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schwinger_core::model::bare_vacuum_index;
use schwinger_core::observables::{
    asymptotic_density_gap, charge_density, particle_density, post_select, sector_bitstrings, state_leakage,
    state_projection, vacuum_persistence, ObservableRow,
};
use schwinger_core::{bare_vacuum, evolve, exact_evolve, OrderingScheme, PopulationTable, TrotterPlan};

/// Two-level Rabi formula in the `{|01⟩, |10⟩}` sector of the two-site model.
fn two_site_persistence(x: f64, mu: f64, t: f64) -> f64 {
    let a = (-1.0 - mu) / 2.0;
    let b = mu / 2.0;
    let delta = a - b;
    let g = 2.0 * x;
    let omega = (g * g + delta * delta).sqrt();
    1.0 - g * g / (omega * omega) * (omega * t).sin().powi(2)
}

#[test]
fn two_site_persistence_matches_rabi_formula() {
    let m = model(2);
    let psi0 = bare_vacuum(m.params()).unwrap();
    for t in [0.0, 0.4, 1.3, 5.0, 19.5] {
        let psi = exact_evolve(&m, &psi0, t).unwrap();
        let got = vacuum_persistence(&psi, &psi0).unwrap();
        assert!((got - two_site_persistence(0.6, 0.1, t)).abs() < 1e-10, "t={t}");
    }
}

#[test]
fn total_charge_is_conserved_by_exact_evolution() {
    for n in [2, 4, 6] {
        let m = model(n);
        let psi = random_state(n, 40 + n as u64);
        let q0: f64 = charge_density(&psi).unwrap().iter().sum();
        for t in [0.5, 3.0] {
            let q: f64 = charge_density(&exact_evolve(&m, &psi, t).unwrap()).unwrap().iter().sum();
            assert!((q - q0).abs() < 1e-10);
        }
    }
}

#[test]
fn projections_over_the_sector_plus_leakage_are_complete() {
    let m = model(4);
    let psi0 = bare_vacuum(m.params()).unwrap();
    let traj = evolve(&m, &psi0, &TrotterPlan::new(OrderingScheme::XYZ, 1, 1.0, 5)).unwrap();
    for psi in traj {
        let allowed: f64 = sector_bitstrings(4, 0).iter().map(|b| state_projection(&psi, b).unwrap()).sum();
        assert!((allowed + state_leakage(&psi, 0) - 1.0).abs() < 1e-10);
        assert_eq!(state_projection(&psi, "0101").unwrap(), vacuum_persistence(&psi, &psi0).unwrap());
    }
}

#[test]
fn observable_rows_from_states_and_samples_agree() {
    let m = model(4);
    let psi0 = bare_vacuum(m.params()).unwrap();
    let psi = exact_evolve(&m, &psi0, 1.7).unwrap();
    let bits = sector_bitstrings(4, 0);
    let exact = ObservableRow::from_state(1.7, &psi, &psi0, 0, Some(&bits)).unwrap();
    let sampled =
        ObservableRow::from_populations(1.7, &psi.sample(200_000, 3).unwrap(), bare_vacuum_index(4), 0, Some(&bits)).unwrap();
    assert!((exact.p_vac - sampled.p_vac).abs() < 0.01);
    assert!((exact.nu - sampled.nu).abs() < 0.01);
    for (a, b) in exact.q.iter().zip(&sampled.q) {
        assert!((a - b).abs() < 0.01);
    }
    assert_eq!(exact.projections.as_ref().unwrap().len(), 6);
}

/// Each bit flips independently with probability `p`.
fn bit_flip_channel(pop: &PopulationTable, p: f64) -> PopulationTable {
    let n = pop.n_sites();
    let mut probs: Vec<f64> = (0..1usize << n).map(|b| pop.probability(b)).collect();
    for q in 0..n {
        let mask = 1 << q;
        let mut next = vec![0.0; probs.len()];
        for (b, &v) in probs.iter().enumerate() {
            next[b] += (1.0 - p) * v;
            next[b ^ mask] += p * v;
        }
        probs = next;
    }
    PopulationTable::exact(n, probs.into_iter().enumerate().filter(|(_, v)| *v > 0.0).collect())
}

fn sample_table(pop: &PopulationTable, shots: u64, rng: &mut ChaCha8Rng) -> PopulationTable {
    let entries: Vec<(usize, f64)> = pop.iter().collect();
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let mut r = rng.random::<f64>() * pop.total();
        let mut pick = entries.last().unwrap().0;
        for &(b, p) in &entries {
            if r < p {
                pick = b;
                break;
            }
            r -= p;
        }
        *counts.entry(pick).or_insert(0u64) += 1;
    }
    PopulationTable::from_counts(pop.n_sites(), counts)
}

#[test]
fn post_selection_mitigates_symmetry_breaking_noise() {
    let m = model(4);
    let psi0 = bare_vacuum(m.params()).unwrap();
    let vac = bare_vacuum_index(4);
    let traj = evolve(&m, &psi0, &TrotterPlan::new(OrderingScheme::OE1, 1, 0.5, 10)).unwrap();
    let mut better = 0;
    let seeds = 20;
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut raw_err, mut sel_err) = (0.0, 0.0);
        for psi in &traj {
            let truth = psi.populations().probability(vac);
            let noisy = sample_table(&bit_flip_channel(&psi.populations(), 0.03), 2000, &mut rng);
            raw_err += (noisy.probability(vac) - truth).abs();
            sel_err += (post_select(&noisy, 0).unwrap().probability(vac) - truth).abs();
        }
        if sel_err < raw_err {
            better += 1;
        }
    }
    assert!(better >= 18, "post-selection helped in {better}/{seeds} runs");
}

#[test]
fn large_lattice_density_diagnostic() {
    // ν ≈ −ln(P_vac)/N only asymptotically; printed, not asserted
    let m = model(10);
    let psi0 = bare_vacuum(m.params()).unwrap();
    for t in [0.2, 0.5, 1.0] {
        let psi = exact_evolve(&m, &psi0, t).unwrap();
        let (nu, _) = particle_density(&psi).unwrap();
        let pv = vacuum_persistence(&psi, &psi0).unwrap();
        println!("t={t}: nu={nu:.5} gap={:.5}", asymptotic_density_gap(nu, pv, 10));
        assert!(nu.is_finite() && pv > 0.0);
    }
}
