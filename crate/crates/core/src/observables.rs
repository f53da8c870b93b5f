//! Physical quantities from states and Z-basis population tables.
//!
//! Sites are 0-based here; the staggering sign `(−1)^n` uses the 1-based site
//! number `n = q + 1`, so even-`q` sites are the "odd" sites of the lattice.
//! All site-resolved quantities are diagonal in the measurement basis and are
//! therefore computed from populations.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{bitstring, parse_bitstring, PopulationTable, StateVector};

/// `(−1)^n` for 0-based site `q`.
fn stagger(q: usize) -> f64 {
    if q % 2 == 0 {
        -1.0
    } else {
        1.0
    }
}

fn z_value(index: usize, q: usize, n_sites: usize) -> f64 {
    if index >> (n_sites - 1 - q) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn charge(index: usize, n_sites: usize) -> i32 {
    n_sites as i32 - 2 * index.count_ones() as i32
}

/// `⟨Z_q⟩` for every site.
pub fn z_expectations(pop: &PopulationTable) -> Vec<f64> {
    let n = pop.n_sites();
    (0..n)
        .map(|q| pop.iter().map(|(b, p)| p * z_value(b, q, n)).sum())
        .collect()
}

/// `|⟨ψ0|ψ⟩|²`.
pub fn vacuum_persistence(psi: &StateVector, psi0: &StateVector) -> Result<f64> {
    Ok(psi0.inner(psi)?.norm_sqr())
}

/// Mean density `ν` and per-site `ν_n = ((−1)^n ⟨Z_n⟩ + 1)/2`.
pub fn particle_density_of(pop: &PopulationTable) -> (f64, Vec<f64>) {
    let per_site: Vec<f64> = z_expectations(pop)
        .into_iter()
        .enumerate()
        .map(|(q, z)| (stagger(q) * z + 1.0) / 2.0)
        .collect();
    let mean = per_site.iter().sum::<f64>() / per_site.len() as f64;
    (mean, per_site)
}

pub fn particle_density(psi: &StateVector) -> Result<(f64, Vec<f64>)> {
    psi.check_normalized()?;
    Ok(particle_density_of(&psi.populations()))
}

/// `Q_n = (⟨Z_n⟩ + (−1)^n)/2`; a particle carries −1.
pub fn charge_density_of(pop: &PopulationTable) -> Vec<f64> {
    z_expectations(pop)
        .into_iter()
        .enumerate()
        .map(|(q, z)| (z + stagger(q)) / 2.0)
        .collect()
}

pub fn charge_density(psi: &StateVector) -> Result<Vec<f64>> {
    psi.check_normalized()?;
    Ok(charge_density_of(&psi.populations()))
}

/// Probability outside the `S_z = reference_charge` sector.
pub fn leakage(pop: &PopulationTable, reference_charge: i32) -> f64 {
    let n = pop.n_sites();
    pop.iter()
        .filter(|&(b, _)| charge(b, n) != reference_charge)
        .fold(0.0, |acc, (_, p)| acc + p)
}

pub fn state_leakage(psi: &StateVector, reference_charge: i32) -> f64 {
    let n = psi.n_sites();
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|&(b, _)| charge(b, n) != reference_charge)
        .fold(0.0, |acc, (_, a)| acc + a.norm_sqr())
}

/// Drops forbidden-sector outcomes and renormalizes. Sampled tables keep
/// only the surviving shots.
pub fn post_select(pop: &PopulationTable, reference_charge: i32) -> Result<PopulationTable> {
    let n = pop.n_sites();
    let kept: BTreeMap<usize, f64> = pop.iter().filter(|&(b, _)| charge(b, n) == reference_charge).collect();
    let total: f64 = kept.values().sum();
    if total <= 0.0 {
        return Err(Error::NothingSurvives);
    }
    let shots = match pop.shots() {
        Some(_) => Some(kept.keys().map(|&b| pop.count(b).unwrap_or(0)).sum()),
        None => None,
    };
    let entries = kept.into_iter().map(|(b, p)| (b, p / total)).collect();
    Ok(PopulationTable::from_parts(n, entries, shots))
}

/// `|⟨b|ψ⟩|²` for the basis state named by `bits`.
pub fn state_projection(psi: &StateVector, bits: &str) -> Result<f64> {
    let b = parse_bitstring(bits, psi.n_sites())?;
    Ok(psi.amplitudes()[b].norm_sqr())
}

pub fn projection_of(pop: &PopulationTable, bits: &str) -> Result<f64> {
    Ok(pop.probability(parse_bitstring(bits, pop.n_sites())?))
}

/// Bitstrings of every basis state with the given charge, ascending.
pub fn sector_bitstrings(n_sites: usize, reference_charge: i32) -> Vec<String> {
    (0..1usize << n_sites)
        .filter(|&b| charge(b, n_sites) == reference_charge)
        .map(|b| bitstring(b, n_sites))
        .collect()
}

/// Multiplies the probability vector by a user-supplied `2^N × 2^N`
/// correction matrix (e.g. an inverted state-transfer matrix). Entries are
/// not clipped, so the result may contain small negative values.
pub fn apply_readout_correction(pop: &PopulationTable, correction: &DMatrix<f64>) -> Result<PopulationTable> {
    let dim = 1usize << pop.n_sites();
    if correction.nrows() != dim || correction.ncols() != dim {
        return Err(Error::DimensionMismatch { left: correction.nrows(), right: dim });
    }
    let mut p = DVector::zeros(dim);
    for (b, v) in pop.iter() {
        p[b] = v;
    }
    let q = correction * p;
    let entries = q.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(b, v)| (b, *v)).collect();
    Ok(PopulationTable::from_parts(pop.n_sites(), entries, None))
}

/// `ν + ln(P_vac)/N`: zero in the large-N limit, reported as a diagnostic.
pub fn asymptotic_density_gap(nu: f64, p_vac: f64, n_sites: usize) -> f64 {
    nu + p_vac.ln() / n_sites as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservableRow {
    pub time: f64,
    pub p_vac: f64,
    pub nu: f64,
    pub q: Vec<f64>,
    pub leakage: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projections: Option<BTreeMap<String, f64>>,
}

impl ObservableRow {
    /// Row from measured populations; `initial_index` is the basis state the
    /// run started in, whose probability is `P_vac`.
    pub fn from_populations(
        time: f64,
        pop: &PopulationTable,
        initial_index: usize,
        reference_charge: i32,
        projections: Option<&[String]>,
    ) -> Result<Self> {
        let (nu, _) = particle_density_of(pop);
        let projections = projections
            .map(|bits| {
                bits.iter()
                    .map(|s| Ok((s.clone(), projection_of(pop, s)?)))
                    .collect::<Result<BTreeMap<_, _>>>()
            })
            .transpose()?;
        Ok(Self {
            time,
            p_vac: pop.probability(initial_index),
            nu,
            q: charge_density_of(pop),
            leakage: leakage(pop, reference_charge),
            projections,
        })
    }

    pub fn from_state(
        time: f64,
        psi: &StateVector,
        psi0: &StateVector,
        reference_charge: i32,
        projections: Option<&[String]>,
    ) -> Result<Self> {
        psi.check_normalized()?;
        let pop = psi.populations();
        let mut row = Self::from_populations(time, &pop, 0, reference_charge, projections)?;
        row.p_vac = vacuum_persistence(psi, psi0)?;
        Ok(row)
    }
}

/// `time,p_vac,nu,q_1..q_N,leakage`.
pub fn write_observables_csv<W: Write>(rows: &[ObservableRow], mut w: W) -> Result<()> {
    let n = rows.first().map_or(0, |r| r.q.len());
    let q_cols: String = (1..=n).map(|k| format!(",q_{k}")).collect();
    writeln!(w, "time,p_vac,nu{q_cols},leakage")?;
    for r in rows {
        let qs: String = r.q.iter().map(|v| format!(",{v}")).collect();
        writeln!(w, "{},{},{}{qs},{}", r.time, r.p_vac, r.nu, r.leakage)?;
    }
    Ok(())
}

/// `time,bitstring,probability` for every row carrying projections.
pub fn write_projections_csv<W: Write>(rows: &[ObservableRow], mut w: W) -> Result<()> {
    writeln!(w, "time,bitstring,probability")?;
    for r in rows {
        for (bits, p) in r.projections.iter().flatten() {
            writeln!(w, "{},{bits},{p}", r.time)?;
        }
    }
    Ok(())
}
