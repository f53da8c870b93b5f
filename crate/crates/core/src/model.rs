//! Spin Hamiltonian of the purely fermionic lattice Schwinger model with open
//! boundaries and zero incoming field:
//!
//! ```text
//! H = x Σ_{n<N} (X_n X_{n+1} + Y_n Y_{n+1})
//!   + ¼ Σ_{n<N} [Σ_{m≤n} (Z_m + (−1)^m)]²
//!   + μ Σ_n (−1)^n (Z_n + 1)/2
//! ```
//!
//! Sites are numbered `1..=N` in formulas and `0..N` in code. Expanding the
//! squared cumulative charge gives
//!
//! * `Z_m Z_l` (m < l) with coefficient `(N − l)/2`, nonzero only for `l ≤ N − 1`;
//! * `Z_n` with coefficient `(−#{odd k : n ≤ k ≤ N−1} + (−1)^n μ)/2`;
//! * the constant `N²/8`, which is recorded and never evolved.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliTerm, TermSum, MAX_SITES};
use crate::state::StateVector;

/// Normalization of the hopping term.
///
/// `Pauli` uses `x (XX + YY)` as written above. `Ladder` uses
/// `x (σ⁺σ⁻ + h.c.) = (x/2)(XX + YY)`, the normalization that reproduces the
/// published symmetry-protection leakage table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hopping {
    #[default]
    Pauli,
    Ladder,
}

impl Hopping {
    pub fn coefficient(self, x: f64) -> f64 {
        match self {
            Hopping::Pauli => x,
            Hopping::Ladder => 0.5 * x,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_sites: usize,
    pub x: f64,
    pub mu: f64,
    #[serde(default)]
    pub hopping: Hopping,
}

impl ModelParams {
    pub fn new(n_sites: usize, x: f64, mu: f64) -> Result<Self> {
        let p = Self {
            n_sites,
            x,
            mu,
            hopping: Hopping::Pauli,
        };
        p.validate()?;
        Ok(p)
    }

    /// `x = 0.6`, `μ = 0.1`, the couplings used for all hardware runs.
    pub fn with_default_couplings(n_sites: usize) -> Result<Self> {
        Self::new(n_sites, 0.6, 0.1)
    }

    pub fn with_hopping(mut self, hopping: Hopping) -> Self {
        self.hopping = hopping;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites % 2 != 0 {
            return Err(Error::InvalidParams(format!(
                "n_sites must be even and at least 2, got {}",
                self.n_sites
            )));
        }
        if self.n_sites > MAX_SITES {
            return Err(Error::InvalidParams(format!("n_sites must be at most {MAX_SITES}")));
        }
        if !(self.x.is_finite() && self.x > 0.0) {
            return Err(Error::InvalidParams(format!("x must be positive, got {}", self.x)));
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidParams("mu must be finite".into()));
        }
        Ok(())
    }
}

/// `c (X_q X_{q+1} + Y_q Y_{q+1})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoppingBlock {
    pub left: usize,
    pub coefficient: f64,
}

/// `(half_units / 2) Z_first Z_second`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZzPair {
    pub first: usize,
    pub second: usize,
    pub half_units: i64,
}

impl ZzPair {
    pub fn coefficient(&self) -> f64 {
        self.half_units as f64 / 2.0
    }
}

/// Single-Z coefficient `(half_units + mu_sign·μ) / 2`, kept symbolic so the
/// compiled rotation angles can be compared exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZCoefficient {
    pub half_units: i64,
    pub mu_sign: i64,
}

impl ZCoefficient {
    pub fn value(&self, mu: f64) -> f64 {
        (self.half_units as f64 + self.mu_sign as f64 * mu) / 2.0
    }
}

#[derive(Clone, Debug)]
pub struct SchwingerModel {
    params: ModelParams,
    hopping: Vec<HoppingBlock>,
    zz: Vec<ZzPair>,
    z: Vec<ZCoefficient>,
    dropped_constant: f64,
}

pub fn build_model(params: ModelParams) -> Result<SchwingerModel> {
    params.validate()?;
    let n = params.n_sites;
    let c = params.hopping.coefficient(params.x);
    let hopping = (0..n - 1)
        .map(|left| HoppingBlock { left, coefficient: c })
        .collect();

    let mut zz = Vec::new();
    for m in 1..n {
        for l in (m + 1)..n {
            zz.push(ZzPair {
                first: m - 1,
                second: l - 1,
                half_units: (n - l) as i64,
            });
        }
    }

    let z = (1..=n)
        .map(|site| {
            let odd_links = (site..n).filter(|k| k % 2 == 1).count() as i64;
            ZCoefficient {
                half_units: -odd_links,
                mu_sign: if site % 2 == 0 { 1 } else { -1 },
            }
        })
        .collect();

    // ¼ Σ_{n<N} (n + c_n²) with c_n² = 1 on odd n; the mass term's constant
    // Σ (−1)^n μ/2 vanishes for even N.
    let dropped_constant = (n * n) as f64 / 8.0;

    Ok(SchwingerModel {
        params,
        hopping,
        zz,
        z,
        dropped_constant,
    })
}

impl SchwingerModel {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_sites(&self) -> usize {
        self.params.n_sites
    }

    pub fn hopping_blocks(&self) -> &[HoppingBlock] {
        &self.hopping
    }

    pub fn zz_pairs(&self) -> &[ZzPair] {
        &self.zz
    }

    pub fn z_profile(&self) -> &[ZCoefficient] {
        &self.z
    }

    pub fn z_coefficients(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.value(self.params.mu)).collect()
    }

    pub fn dropped_constant(&self) -> f64 {
        self.dropped_constant
    }

    /// ZZ coefficient for 0-based sites `a < b`; zero for pairs involving the last site.
    pub fn zz_coefficient(&self, a: usize, b: usize) -> f64 {
        self.zz
            .iter()
            .find(|p| p.first == a && p.second == b)
            .map(ZzPair::coefficient)
            .unwrap_or(0.0)
    }

    fn pauli(&self, ops: &[(usize, Pauli)]) -> PauliString {
        PauliString::from_sparse(self.n_sites(), ops)
    }

    fn collect(&self, terms: impl IntoIterator<Item = PauliTerm>) -> TermSum {
        TermSum::from_terms(self.n_sites(), terms).expect("terms built on the model register")
    }

    /// Block `k` of the hopping term, acting on sites `(k, k+1)`.
    pub fn h_x_pair(&self, k: usize) -> TermSum {
        let b = self.hopping[k];
        self.collect([
            PauliTerm::new(b.coefficient, self.pauli(&[(b.left, Pauli::X), (b.left + 1, Pauli::X)])),
            PauliTerm::new(b.coefficient, self.pauli(&[(b.left, Pauli::Y), (b.left + 1, Pauli::Y)])),
        ])
    }

    pub fn h_x(&self) -> TermSum {
        let parts: Vec<TermSum> = (0..self.hopping.len()).map(|k| self.h_x_pair(k)).collect();
        TermSum::sum(self.n_sites(), &parts).expect("same register")
    }

    /// Only the `XX` (or `YY`) half of the hopping term.
    pub fn h_hopping_axis(&self, axis: Pauli) -> TermSum {
        self.collect(
            self.hopping
                .iter()
                .map(|b| PauliTerm::new(b.coefficient, self.pauli(&[(b.left, axis), (b.left + 1, axis)]))),
        )
    }

    pub fn h_zz_pair(&self, pair: &ZzPair) -> TermSum {
        self.collect([PauliTerm::new(
            pair.coefficient(),
            self.pauli(&[(pair.first, Pauli::Z), (pair.second, Pauli::Z)]),
        )])
    }

    pub fn h_zz(&self) -> TermSum {
        self.collect(self.zz.iter().map(|p| {
            PauliTerm::new(p.coefficient(), self.pauli(&[(p.first, Pauli::Z), (p.second, Pauli::Z)]))
        }))
    }

    pub fn h_z(&self) -> TermSum {
        let mu = self.params.mu;
        self.collect(
            self.z
                .iter()
                .enumerate()
                .map(|(q, c)| PauliTerm::new(c.value(mu), self.pauli(&[(q, Pauli::Z)]))),
        )
    }

    /// `H^ZZ + H^Z`.
    pub fn diagonal(&self) -> TermSum {
        let mut d = self.h_zz();
        d.add(&self.h_z()).expect("same register");
        d
    }

    /// The full Hamiltonian without the dropped constant.
    pub fn hamiltonian(&self) -> TermSum {
        let mut h = self.h_x();
        h.add(&self.diagonal()).expect("same register");
        h
    }

    /// Diagonal energy of every basis state under `H^ZZ + H^Z`.
    pub fn diagonal_energies(&self) -> Vec<f64> {
        diagonal_energies(&self.diagonal())
    }

    pub fn export(&self) -> ModelExport {
        ModelExport {
            n_sites: self.n_sites(),
            x: self.params.x,
            mu: self.params.mu,
            hopping: self.params.hopping,
            constant: self.dropped_constant,
            terms: self
                .hamiltonian()
                .iter()
                .map(|t| ExportedTerm {
                    sites: t.string.support(),
                    axes: t.string.support().iter().map(|&q| t.string.axis(q).as_char()).collect(),
                    coefficient: t.coefficient.re,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.export())?)
    }
}

/// Energies `E_b = Σ c_k ⟨b|P_k|b⟩` of a sum of `I`/`Z` strings.
pub fn diagonal_energies(sum: &TermSum) -> Vec<f64> {
    let n = sum.n_sites();
    let terms: Vec<(u64, f64)> = sum
        .iter()
        .map(|t| {
            debug_assert!(t.string.is_diagonal());
            (t.string.z_mask(), t.coefficient.re)
        })
        .collect();
    (0..1usize << n)
        .map(|b| {
            terms
                .iter()
                .map(|&(z, c)| if (z & b as u64).count_ones() % 2 == 0 { c } else { -c })
                .sum()
        })
        .collect()
}

/// Interchange form of the model: Pauli terms on 0-based sites plus the
/// dropped constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelExport {
    pub n_sites: usize,
    pub x: f64,
    pub mu: f64,
    pub hopping: Hopping,
    pub constant: f64,
    pub terms: Vec<ExportedTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportedTerm {
    pub sites: Vec<usize>,
    pub axes: String,
    pub coefficient: f64,
}

impl ModelExport {
    pub fn to_term_sum(&self) -> Result<TermSum> {
        let mut sum = TermSum::new(self.n_sites);
        for t in &self.terms {
            let ops = t
                .sites
                .iter()
                .zip(t.axes.chars())
                .map(|(&q, c)| {
                    if q >= self.n_sites {
                        return Err(Error::IndexOutOfRange { index: q, len: self.n_sites });
                    }
                    Pauli::from_char(c).map(|p| (q, p)).ok_or_else(|| Error::BadBitstring(t.axes.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            if ops.len() != t.sites.len() || t.axes.chars().count() != t.sites.len() {
                return Err(Error::BadBitstring(t.axes.clone()));
            }
            sum.add_term(PauliTerm::new(t.coefficient, PauliString::from_sparse(self.n_sites, &ops)))?;
        }
        Ok(sum)
    }
}

/// Index of `|0101…01⟩`: the odd 0-based sites carry a 1.
pub fn bare_vacuum_index(n_sites: usize) -> usize {
    (0..n_sites)
        .filter(|q| q % 2 == 1)
        .map(|q| 1usize << (n_sites - 1 - q))
        .sum()
}

pub fn bare_vacuum(params: &ModelParams) -> Result<StateVector> {
    params.validate()?;
    StateVector::basis(params.n_sites, bare_vacuum_index(params.n_sites))
}

/// `Σ_n z_n` with `z = +1` for bit 0 and `−1` for bit 1.
pub fn symmetry_charge(index: usize, n_sites: usize) -> Result<i32> {
    if n_sites < usize::BITS as usize && index >> n_sites != 0 {
        return Err(Error::IndexOutOfRange {
            index,
            len: 1usize << n_sites,
        });
    }
    Ok(n_sites as i32 - 2 * index.count_ones() as i32)
}
