//! Pure-state simulation: streamed gate kernels, exact evolution and sampling.

use std::collections::BTreeMap;
use std::io::Write;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compiler::NativeGate;
use crate::dense::{ChargeSectors, CMatrix, DEFAULT_DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::model::SchwingerModel;
use crate::pauli::{PauliString, TermSum};

/// Normalization slack accepted on construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Bitstring of a basis index, site 0 first.
pub fn bitstring(index: usize, n_sites: usize) -> String {
    (0..n_sites)
        .map(|q| if index >> (n_sites - 1 - q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(text: &str, n_sites: usize) -> Result<usize> {
    if text.len() != n_sites || !text.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::BadBitstring(text.to_string()));
    }
    Ok(text.chars().fold(0usize, |acc, c| (acc << 1) | (c == '1') as usize))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_sites, amps })
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(n_sites: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { left: amps.len(), right: dim });
        }
        let s = Self { n_sites, amps };
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Unnormalized(n2));
        }
        Ok(s)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_sites: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let n2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(n2 > 0.0 && n2.is_finite()) {
            return Err(Error::Unnormalized(n2));
        }
        let s = 1.0 / n2.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        Self::from_amplitudes(n_sites, amps)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Unnormalized(n2));
        }
        Ok(())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_sites {
            return Err(Error::IndexOutOfRange { index: q, len: self.n_sites });
        }
        Ok(())
    }

    fn mask(&self, q: usize) -> usize {
        1usize << (self.n_sites - 1 - q)
    }

    /// `exp(−i·angle·P)` for a non-identity Pauli string `P`.
    pub fn apply_pauli_rotation(&mut self, string: &PauliString, angle: f64) -> Result<()> {
        if string.n_sites() != self.n_sites {
            return Err(Error::SiteMismatch { left: string.n_sites(), right: self.n_sites });
        }
        if string.is_identity() {
            return Err(Error::IdentityRotation);
        }
        let x = string.x_mask() as usize;
        if x == 0 {
            let z = string.z_mask() as usize;
            let plus = Complex64::from_polar(1.0, -angle);
            let minus = plus.conj();
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= if (z & b).count_ones() % 2 == 0 { plus } else { minus };
            }
            return Ok(());
        }
        let (c, s) = (angle.cos(), angle.sin());
        for b in 0..self.amps.len() {
            let partner = b ^ x;
            if partner < b {
                continue;
            }
            let (phase_b, _) = string.apply_to_basis(b);
            let (phase_p, _) = string.apply_to_basis(partner);
            let (ab, ap) = (self.amps[b], self.amps[partner]);
            // P|b> = phase_b |partner>, P|partner> = phase_p |b>
            self.amps[b] = c * ab - I * s * phase_p * ap;
            self.amps[partner] = c * ap - I * s * phase_b * ab;
        }
        Ok(())
    }

    /// `exp(−i·angle·(X_q X_{q+1} + Y_q Y_{q+1}))`, exactly, as one kernel.
    pub fn apply_hopping(&mut self, left: usize, angle: f64) -> Result<()> {
        self.check_qubit(left + 1)?;
        let (ml, mr) = (self.mask(left), self.mask(left + 1));
        let (c, s) = ((2.0 * angle).cos(), (2.0 * angle).sin());
        for b in 0..self.amps.len() {
            // visit each |01>,|10> pair once, from its |01> member
            if b & ml != 0 || b & mr == 0 {
                continue;
            }
            let p = b ^ ml ^ mr;
            let (ab, ap) = (self.amps[b], self.amps[p]);
            self.amps[b] = c * ab - I * s * ap;
            self.amps[p] = c * ap - I * s * ab;
        }
        Ok(())
    }

    /// Multiplies each amplitude by `exp(−i·weight·energies[b])`.
    pub fn apply_diagonal(&mut self, energies: &[f64], weight: f64) -> Result<()> {
        if energies.len() != self.amps.len() {
            return Err(Error::DimensionMismatch { left: energies.len(), right: self.amps.len() });
        }
        for (a, &e) in self.amps.iter_mut().zip(energies) {
            *a *= Complex64::from_polar(1.0, -weight * e);
        }
        Ok(())
    }

    /// Symmetry rotation `exp(−i·alpha·S_z/2)`, with `S_z = Σ_n Z_n`.
    pub fn apply_charge_rotation(&mut self, alpha: f64) {
        let n = self.n_sites as i32;
        for (b, a) in self.amps.iter_mut().enumerate() {
            let charge = n - 2 * b.count_ones() as i32;
            *a *= Complex64::from_polar(1.0, -0.5 * alpha * charge as f64);
        }
    }

    pub fn apply_native(&mut self, gate: &NativeGate) -> Result<()> {
        match *gate {
            NativeGate::Z { qubit, theta } => {
                self.check_qubit(qubit)?;
                let m = self.mask(qubit);
                let zero = Complex64::from_polar(1.0, -0.5 * theta);
                let one = zero.conj();
                for (b, a) in self.amps.iter_mut().enumerate() {
                    *a *= if b & m == 0 { zero } else { one };
                }
            }
            NativeGate::R { qubit, theta, phi } => {
                self.check_qubit(qubit)?;
                let m = self.mask(qubit);
                let c = Complex64::from((0.5 * theta).cos());
                let s = (0.5 * theta).sin();
                let u01 = -I * s * Complex64::from_polar(1.0, -phi);
                let u10 = -I * s * Complex64::from_polar(1.0, phi);
                for b in 0..self.amps.len() {
                    if b & m != 0 {
                        continue;
                    }
                    let (a0, a1) = (self.amps[b], self.amps[b | m]);
                    self.amps[b] = c * a0 + u01 * a1;
                    self.amps[b | m] = u10 * a0 + c * a1;
                }
            }
            NativeGate::XX { first, second, chi } => {
                self.check_qubit(first)?;
                self.check_qubit(second)?;
                if first == second {
                    return Err(Error::InvalidPlan(format!("XX gate on a single qubit {first}")));
                }
                let (m1, m2) = (self.mask(first), self.mask(second));
                let (c, s) = (chi.cos(), chi.sin());
                for b in 0..self.amps.len() {
                    let p = b ^ m1 ^ m2;
                    if p < b {
                        continue;
                    }
                    let (ab, ap) = (self.amps[b], self.amps[p]);
                    self.amps[b] = c * ab - I * s * ap;
                    self.amps[p] = c * ap - I * s * ab;
                }
            }
        }
        Ok(())
    }

    /// Exact Z-basis populations.
    pub fn populations(&self) -> PopulationTable {
        PopulationTable {
            n_sites: self.n_sites,
            entries: self
                .amps
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 0.0)
                .map(|(b, a)| (b, a.norm_sqr()))
                .collect(),
            shots: None,
        }
    }

    /// Multinomial draw of `shots` Z-basis measurements, reproducible in `seed`.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<PopulationTable> {
        if shots == 0 {
            return Err(Error::InvalidPlan("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for _ in 0..shots {
            let r = rng.random::<f64>() * acc;
            let mut idx = cdf.partition_point(|&c| c <= r);
            // never land on a zero-probability tail entry
            while idx > 0 && (idx >= cdf.len() || self.amps[idx].norm_sqr() == 0.0) {
                idx -= 1;
            }
            *counts.entry(idx).or_insert(0) += 1;
        }
        Ok(PopulationTable::from_counts(self.n_sites, counts))
    }

    /// CSV dump with columns `index,re,im`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,re,im")?;
        for (b, a) in self.amps.iter().enumerate() {
            writeln!(w, "{b},{:e},{:e}", a.re, a.im)?;
        }
        Ok(())
    }

    /// Raw little-endian `f64` pairs `(re, im)` in index order.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.amps
            .iter()
            .flat_map(|a| a.re.to_le_bytes().into_iter().chain(a.im.to_le_bytes()))
            .collect()
    }

    pub fn from_bytes(n_sites: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 16 << n_sites {
            return Err(Error::DimensionMismatch { left: bytes.len() / 16, right: 1 << n_sites });
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Self::from_amplitudes(n_sites, amps)
    }
}

/// Z-basis measurement record: probabilities by basis index, plus the shot
/// count when the record came from sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationTable {
    n_sites: usize,
    entries: BTreeMap<usize, f64>,
    shots: Option<u64>,
}

impl PopulationTable {
    pub fn exact(n_sites: usize, entries: BTreeMap<usize, f64>) -> Self {
        Self { n_sites, entries, shots: None }
    }

    pub fn from_counts(n_sites: usize, counts: BTreeMap<usize, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let entries = counts
            .into_iter()
            .map(|(b, c)| (b, c as f64 / total as f64))
            .collect();
        Self { n_sites, entries, shots: Some(total) }
    }

    pub(crate) fn from_parts(n_sites: usize, entries: BTreeMap<usize, f64>, shots: Option<u64>) -> Self {
        Self { n_sites, entries, shots }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.entries.get(&index).copied().unwrap_or(0.0)
    }

    /// Shot count for `index`, when sampled.
    pub fn count(&self, index: usize) -> Option<u64> {
        self.shots.map(|s| (self.probability(index) * s as f64).round() as u64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&b, &p)| (b, p))
    }

    pub fn total(&self) -> f64 {
        self.entries.values().sum()
    }

    /// CSV with columns `index,bitstring,probability` (exact) or
    /// `index,bitstring,count` (sampled).
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        match self.shots {
            None => {
                writeln!(w, "index,bitstring,probability")?;
                for (b, p) in self.iter() {
                    writeln!(w, "{b},{},{p}", bitstring(b, self.n_sites))?;
                }
            }
            Some(_) => {
                writeln!(w, "index,bitstring,count")?;
                for (b, _) in self.iter() {
                    writeln!(w, "{b},{},{}", bitstring(b, self.n_sites), self.count(b).unwrap_or(0))?;
                }
            }
        }
        Ok(())
    }
}

/// Exact `exp(−i t H)` for a charge-conserving Hamiltonian, diagonalized once
/// per charge sector.
pub struct ExactPropagator {
    n_sites: usize,
    blocks: Vec<(Vec<usize>, SymmetricEigen<Complex64, nalgebra::Dyn>)>,
}

impl ExactPropagator {
    pub fn new(model: &SchwingerModel, dense_limit: usize) -> Result<Self> {
        Self::from_hamiltonian(&model.hamiltonian(), dense_limit)
    }

    pub fn from_hamiltonian(h: &TermSum, dense_limit: usize) -> Result<Self> {
        let n = h.n_sites();
        if n > dense_limit {
            return Err(Error::DenseLimit { n_sites: n, limit: dense_limit });
        }
        let sectors = ChargeSectors::new(n);
        let blocks = sectors
            .iter()
            .map(|s| Ok((s.basis.clone(), SymmetricEigen::new(s.block(h)?))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { n_sites: n, blocks })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.n_sites != self.n_sites {
            return Err(Error::SiteMismatch { left: psi.n_sites, right: self.n_sites });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); psi.dim()];
        for (basis, eig) in &self.blocks {
            let local = DVector::from_iterator(basis.len(), basis.iter().map(|&b| psi.amps[b]));
            if local.iter().all(|a| a.norm_sqr() == 0.0) {
                continue;
            }
            let mut coeffs = eig.eigenvectors.adjoint() * local;
            for (c, &e) in coeffs.iter_mut().zip(eig.eigenvalues.iter()) {
                *c *= Complex64::from_polar(1.0, -t * e);
            }
            let back = &eig.eigenvectors * coeffs;
            for (&b, a) in basis.iter().zip(back.iter()) {
                out[b] = *a;
            }
        }
        Ok(StateVector { n_sites: self.n_sites, amps: out })
    }

    /// `exp(−i t H)` restricted to each sector, paired with the sector basis.
    pub fn sector_unitaries(&self, t: f64) -> Vec<(&[usize], CMatrix)> {
        self.blocks
            .iter()
            .map(|(basis, eig)| (basis.as_slice(), crate::dense::phases_in_eigenbasis(eig, t)))
            .collect()
    }
}

/// `exp(−i t H) |psi0⟩` with the model's constant dropped.
pub fn exact_evolve(model: &SchwingerModel, psi0: &StateVector, t: f64) -> Result<StateVector> {
    ExactPropagator::new(model, DEFAULT_DENSE_LIMIT)?.evolve(psi0, t)
}
