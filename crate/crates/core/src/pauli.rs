//! Pauli-string algebra.
//!
//! Strings are stored in symplectic form: one X bit and one Z bit per site,
//! with `Y = i·X·Z`. Site `q` (0-based) occupies bit `n_sites - 1 - q`, so a
//! string's masks line up with computational-basis indices in which site 0 is
//! the most significant bit.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped after a merge.
pub const MERGE_TOLERANCE: f64 = 1e-14;

/// Largest register a [`PauliString`] can describe.
pub const MAX_SITES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-site Paulis with no coefficient.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_sites: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Self {
        assert!(n_sites <= MAX_SITES, "at most {MAX_SITES} sites supported");
        Self { n_sites, x: 0, z: 0 }
    }

    pub fn from_axes(axes: &[Pauli]) -> Self {
        let mut s = Self::identity(axes.len());
        for (q, &p) in axes.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Builds a string from explicit `(site, axis)` pairs; unlisted sites are identity.
    pub fn from_sparse(n_sites: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n_sites);
        for &(q, p) in ops {
            s.set(q, p);
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let axes = text
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::BadBitstring(text.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if axes.len() > MAX_SITES {
            return Err(Error::BadBitstring(text.to_string()));
        }
        Ok(Self::from_axes(&axes))
    }

    fn bit(&self, q: usize) -> u64 {
        assert!(q < self.n_sites, "site {q} out of range for {} sites", self.n_sites);
        1u64 << (self.n_sites - 1 - q)
    }

    fn set(&mut self, q: usize, p: Pauli) {
        let b = self.bit(q);
        let (x, z) = p.bits();
        self.x = if x { self.x | b } else { self.x & !b };
        self.z = if z { self.z | b } else { self.z & !b };
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn axis(&self, q: usize) -> Pauli {
        let b = self.bit(q);
        Pauli::from_bits(self.x & b != 0, self.z & b != 0)
    }

    pub fn axes(&self) -> Vec<Pauli> {
        (0..self.n_sites).map(|q| self.axis(q)).collect()
    }

    /// Sites carrying a non-identity Pauli, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_sites).filter(|&q| self.axis(q) != Pauli::I).collect()
    }

    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True when the string contains only I and Z.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Product `self · other` as `(i^k, string)` with `k` returned mod 4.
    pub fn mul(&self, other: &Self) -> (u32, PauliString) {
        debug_assert_eq!(self.n_sites, other.n_sites);
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() as i64 + (other.x & other.z).count_ones() as i64
            - (x & z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64;
        (
            k.rem_euclid(4) as u32,
            PauliString {
                n_sites: self.n_sites,
                x,
                z,
            },
        )
    }

    /// Action on the computational basis state `|index⟩`: returns `(phase, image)`
    /// with `P|index⟩ = phase·|image⟩`.
    #[inline]
    pub fn apply_to_basis(&self, index: usize) -> (Complex64, usize) {
        let b = index as u64;
        let mut k = (self.x & self.z).count_ones() + 2 * (self.z & b).count_ones();
        k %= 4;
        (I_POWERS[k as usize], (b ^ self.x) as usize)
    }
}

pub(crate) const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_sites {
            write!(f, "{}", self.axis(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

/// A weighted Pauli string. The coefficient is complex because products of
/// Hermitian strings pick up factors of `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: impl Into<Complex64>, string: PauliString) -> Self {
        Self {
            coefficient: coefficient.into(),
            string,
        }
    }

    pub fn n_sites(&self) -> usize {
        self.string.n_sites()
    }

    pub fn axes(&self) -> Vec<Pauli> {
        self.string.axes()
    }
}

/// Operator product `a · b`, with the `i`-phase folded into the coefficient.
pub fn multiply(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    check_sites(a.n_sites(), b.n_sites())?;
    let (k, string) = a.string.mul(&b.string);
    Ok(PauliTerm {
        coefficient: a.coefficient * b.coefficient * I_POWERS[k as usize],
        string,
    })
}

fn check_sites(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::SiteMismatch { left, right });
    }
    Ok(())
}

/// A sum of Pauli terms on a common register, merged by string.
#[derive(Clone, PartialEq)]
pub struct TermSum {
    n_sites: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl TermSum {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(n_sites: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let mut sum = Self::new(n_sites);
        for t in terms {
            sum.add_term(t)?;
        }
        Ok(sum)
    }

    pub fn single(term: PauliTerm) -> Self {
        let mut sum = Self::new(term.n_sites());
        sum.push(term.coefficient, term.string);
        sum
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, term: PauliTerm) -> Result<()> {
        check_sites(self.n_sites, term.n_sites())?;
        self.push(term.coefficient, term.string);
        Ok(())
    }

    fn push(&mut self, c: Complex64, s: PauliString) {
        let entry = self.terms.entry(s).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.norm() < MERGE_TOLERANCE {
            self.terms.remove(&s);
        }
    }

    pub fn add(&mut self, other: &TermSum) -> Result<()> {
        check_sites(self.n_sites, other.n_sites)?;
        for (&s, &c) in &other.terms {
            self.push(c, s);
        }
        Ok(())
    }

    pub fn sum<'a>(n_sites: usize, parts: impl IntoIterator<Item = &'a TermSum>) -> Result<Self> {
        let mut out = Self::new(n_sites);
        for p in parts {
            out.add(p)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: impl Into<Complex64>) -> Self {
        let f = factor.into();
        let mut out = Self::new(self.n_sites);
        for (&s, &c) in &self.terms {
            out.push(c * f, s);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = PauliTerm> + '_ {
        self.terms.iter().map(|(&string, &coefficient)| PauliTerm {
            coefficient,
            string,
        })
    }

    pub fn coefficient(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    /// Operator product of two sums.
    pub fn product(a: &TermSum, b: &TermSum) -> Result<TermSum> {
        check_sites(a.n_sites, b.n_sites)?;
        let mut out = Self::new(a.n_sites);
        for (sa, &ca) in &a.terms {
            for (sb, &cb) in &b.terms {
                let (k, s) = sa.mul(sb);
                out.push(ca * cb * I_POWERS[k as usize], s);
            }
        }
        Ok(out)
    }

    /// Largest imaginary part over all coefficients.
    pub fn max_imag(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Sum of coefficient magnitudes; an upper bound on the spectral norm.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// True when every term commutes with total `Z` magnetization.
    pub fn conserves_charge(&self) -> bool {
        let sz = TermSum::from_terms(
            self.n_sites,
            (0..self.n_sites)
                .map(|q| PauliTerm::new(1.0, PauliString::from_sparse(self.n_sites, &[(q, Pauli::Z)]))),
        )
        .expect("same register");
        commutator(self, &sz).map(|c| c.is_empty()).unwrap_or(false)
    }
}

impl fmt::Debug for TermSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for (s, c) in &self.terms {
            list.entry(&format_args!("({c}) {s}"));
        }
        list.finish()
    }
}

/// `[a, b] = ab − ba`. Commuting string pairs are skipped and anticommuting
/// ones contribute `2ab`, so the result never carries cancelled terms.
pub fn commutator(a: &TermSum, b: &TermSum) -> Result<TermSum> {
    check_sites(a.n_sites, b.n_sites)?;
    let mut out = TermSum::new(a.n_sites);
    for (sa, &ca) in &a.terms {
        for (sb, &cb) in &b.terms {
            if sa.commutes_with(sb) {
                continue;
            }
            let (k, s) = sa.mul(sb);
            out.push(2.0 * ca * cb * I_POWERS[k as usize], s);
        }
    }
    Ok(out)
}
