//! Dense realizations of Pauli sums, spectral norms, and charge-sector blocks.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::symmetry_charge;
use crate::pauli::TermSum;

pub type CMatrix = DMatrix<Complex64>;

/// Default maximum register size for full-space dense matrices.
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Largest dimension for which [`spectral_norm`] takes a full SVD.
pub const SVD_DIMENSION_LIMIT: usize = 4096;

const POWER_TOLERANCE: f64 = 1e-10;
const POWER_MAX_ITERATIONS: usize = 100_000;

/// A `2^n × 2^n` complex matrix on an `n`-site register.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n_sites: usize,
    matrix: CMatrix,
}

impl DenseOperator {
    pub fn new(n_sites: usize, matrix: CMatrix) -> Result<Self> {
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: matrix.nrows().max(matrix.ncols()),
                right: dim,
            });
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn identity(n_sites: usize) -> Self {
        let dim = 1usize << n_sites;
        Self {
            n_sites,
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n_sites: self.n_sites,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            n_sites: self.n_sites,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            n_sites: self.n_sites,
            matrix: &self.matrix - &other.matrix,
        })
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n_sites != other.n_sites {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Largest elementwise magnitude of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }
}

/// Dense matrix of a Pauli sum, refusing registers beyond [`DEFAULT_DENSE_LIMIT`].
pub fn to_dense(sum: &TermSum) -> Result<DenseOperator> {
    to_dense_with_limit(sum, DEFAULT_DENSE_LIMIT)
}

pub fn to_dense_with_limit(sum: &TermSum, limit: usize) -> Result<DenseOperator> {
    let n = sum.n_sites();
    if n > limit {
        return Err(Error::DenseLimit { n_sites: n, limit });
    }
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for term in sum.iter() {
        for col in 0..dim {
            let (phase, row) = term.string.apply_to_basis(col);
            m[(row, col)] += term.coefficient * phase;
        }
    }
    Ok(DenseOperator { n_sites: n, matrix: m })
}

/// Largest singular value. Full SVD up to [`SVD_DIMENSION_LIMIT`], power
/// iteration on `A†A` above it.
pub fn spectral_norm(op: &DenseOperator) -> Result<f64> {
    matrix_spectral_norm(op.matrix())
}

pub fn matrix_spectral_norm(m: &CMatrix) -> Result<f64> {
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if m.is_empty() {
        return Ok(0.0);
    }
    if m.nrows().max(m.ncols()) <= SVD_DIMENSION_LIMIT {
        let sv = m.clone().singular_values();
        Ok(sv.iter().copied().fold(0.0, f64::max))
    } else {
        power_iteration_norm(m)
    }
}

/// Largest singular value via power iteration on `A†A`, converged to a
/// relative change of 1e-10 in the Rayleigh quotient.
pub fn power_iteration_norm(m: &CMatrix) -> Result<f64> {
    if m.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = m.ncols();
    if n == 0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::from_fn(n, |_, _| Complex64::new(rng.random::<f64>() + 0.5, rng.random::<f64>() - 0.5));
    v /= Complex64::from(v.norm());
    let adj = m.adjoint();
    let mut last = 0.0;
    for _ in 0..POWER_MAX_ITERATIONS {
        let w = &adj * (m * &v);
        let rayleigh = v.dotc(&w).re;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v = w / Complex64::from(norm);
        if (rayleigh - last).abs() <= POWER_TOLERANCE * rayleigh.abs() {
            return Ok(rayleigh.max(0.0).sqrt());
        }
        last = rayleigh;
    }
    Ok(last.max(0.0).sqrt())
}

/// `exp(−i·t·H)` for Hermitian `H`, via its eigendecomposition.
pub fn hermitian_propagator(h: &CMatrix, t: f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    phases_in_eigenbasis(&eig, t)
}

pub(crate) fn phases_in_eigenbasis(eig: &SymmetricEigen<Complex64, nalgebra::Dyn>, t: f64) -> CMatrix {
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, -t * e);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= ph;
        }
    }
    scaled * v.adjoint()
}

/// Basis indices grouped by total charge `Σ_n z_n`.
#[derive(Clone, Debug)]
pub struct ChargeSectors {
    n_sites: usize,
    sectors: Vec<Sector>,
}

#[derive(Clone, Debug)]
pub struct Sector {
    pub charge: i32,
    pub basis: Vec<usize>,
}

impl ChargeSectors {
    pub fn new(n_sites: usize) -> Self {
        let mut sectors: Vec<Sector> = (0..=n_sites)
            .map(|ones| Sector {
                charge: n_sites as i32 - 2 * ones as i32,
                basis: Vec::new(),
            })
            .collect();
        for idx in 0..(1usize << n_sites) {
            let ones = idx.count_ones() as usize;
            sectors[ones].basis.push(idx);
        }
        Self { n_sites, sectors }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sector> {
        self.sectors.iter()
    }

    pub fn sector(&self, charge: i32) -> Option<&Sector> {
        self.sectors.iter().find(|s| s.charge == charge)
    }

    pub fn largest_dimension(&self) -> usize {
        self.sectors.iter().map(|s| s.basis.len()).max().unwrap_or(0)
    }
}

impl Sector {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Matrix of a charge-conserving Pauli sum restricted to this sector.
    pub fn block(&self, sum: &TermSum) -> Result<CMatrix> {
        let n = sum.n_sites();
        let position: HashMap<usize, usize> =
            self.basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let dim = self.basis.len();
        let mut m = CMatrix::zeros(dim, dim);
        let mut stray: HashMap<usize, Complex64> = HashMap::new();
        for (col, &b) in self.basis.iter().enumerate() {
            stray.clear();
            for term in sum.iter() {
                let (phase, image) = term.string.apply_to_basis(b);
                let amp = term.coefficient * phase;
                match position.get(&image) {
                    Some(&row) => m[(row, col)] += amp,
                    None => *stray.entry(image).or_default() += amp,
                }
            }
            if stray.values().any(|a| a.norm() > 1e-12) {
                return Err(Error::ChargeViolation);
            }
        }
        debug_assert!(self.basis.iter().all(|&b| symmetry_charge(b, n).ok() == Some(self.charge)));
        Ok(m)
    }
}

/// Spectral norm of a charge-conserving Pauli sum: the maximum over
/// charge-sector blocks, which avoids forming the full `2^n` matrix.
pub fn conserving_spectral_norm(sum: &TermSum) -> Result<f64> {
    let sectors = ChargeSectors::new(sum.n_sites());
    let mut best: f64 = 0.0;
    for s in sectors.iter() {
        let block = s.block(sum)?;
        best = best.max(matrix_spectral_norm(&block)?);
    }
    Ok(best)
}
