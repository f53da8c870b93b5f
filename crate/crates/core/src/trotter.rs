//! Product-formula schedules for the Schwinger Hamiltonian.
//!
//! A [`StepSequence`] lists exponential factors in *application* order: the
//! first factor acts on the state first. Operator products such as
//! `e^{−iδt H^Z} e^{−iδt H^ZZ} ∏ e^{−iδt H^x_even} ∏ e^{−iδt H^x_odd}` are read
//! right to left, so the odd hopping blocks come first in the list.
//!
//! Orders above two use Suzuki's fractal recursion
//! `S_p(δt) = S_{p−2}(u δt)² S_{p−2}((1−4u) δt) S_{p−2}(u δt)²` with
//! `u = 1/(4 − 4^{1/(p−1)})`.
//!
//! Symmetry protection conjugates step `k` as `C†(α_k) S C(α_k)` with
//! `C(α) = exp(−iα S_z/2)`, `S_z = Σ_n Z_n`. The half makes α a spin-rotation
//! angle: charge-changing transitions (ΔS_z = ±2) pick up `e^{∓iα}`, so α has
//! period 2π.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{CMatrix, DenseOperator, DEFAULT_DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::model::{bare_vacuum_index, diagonal_energies, SchwingerModel};
use crate::observables::state_leakage;
use crate::pauli::{Pauli, PauliString, PauliTerm, TermSum};
use crate::state::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OrderingScheme {
    /// Odd-even on the hopping blocks only, diagonal part last.
    #[serde(rename = "oe1")]
    OE1,
    /// Odd-even on hopping blocks and their nearest-neighbour ZZ partners.
    #[serde(rename = "oe2")]
    OE2,
    /// All XX, then all YY, then the diagonal part.
    #[serde(rename = "xyz")]
    XYZ,
}

impl fmt::Display for OrderingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderingScheme::OE1 => "oe1",
            OrderingScheme::OE2 => "oe2",
            OrderingScheme::XYZ => "xyz",
        })
    }
}

impl FromStr for OrderingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oe1" => Ok(OrderingScheme::OE1),
            "oe2" => Ok(OrderingScheme::OE2),
            "xyz" => Ok(OrderingScheme::XYZ),
            other => Err(Error::UnsupportedOrdering(other.to_string())),
        }
    }
}

/// Hermitian generator of one exponential factor.
#[derive(Clone, Debug)]
pub enum Generator {
    /// `c (X_q X_{q+1} + Y_q Y_{q+1})`.
    Hopping { left: usize, coefficient: f64 },
    /// `c P`.
    Pauli { string: PauliString, coefficient: f64 },
    /// Sum of commuting `Z`/`ZZ` terms with cached basis energies.
    Diagonal { terms: TermSum, energies: Arc<Vec<f64>> },
}

impl Generator {
    pub fn diagonal(terms: TermSum) -> Self {
        let energies = Arc::new(diagonal_energies(&terms));
        Generator::Diagonal { terms, energies }
    }

    pub fn to_term_sum(&self, n_sites: usize) -> TermSum {
        match self {
            Generator::Hopping { left, coefficient } => TermSum::from_terms(
                n_sites,
                [Pauli::X, Pauli::Y].map(|a| {
                    PauliTerm::new(*coefficient, PauliString::from_sparse(n_sites, &[(*left, a), (*left + 1, a)]))
                }),
            )
            .expect("same register"),
            Generator::Pauli { string, coefficient } => TermSum::single(PauliTerm::new(*coefficient, *string)),
            Generator::Diagonal { terms, .. } => terms.clone(),
        }
    }

    /// Whether the generator commutes with `S_z`.
    pub fn conserves_charge(&self) -> bool {
        match self {
            Generator::Hopping { .. } | Generator::Diagonal { .. } => true,
            Generator::Pauli { string, .. } => string.x_mask() == 0,
        }
    }
}

/// `exp(−i·time·generator)`.
#[derive(Clone, Debug)]
pub struct Factor {
    pub generator: Generator,
    pub time: f64,
}

impl Factor {
    pub fn apply(&self, psi: &mut StateVector) -> Result<()> {
        match &self.generator {
            Generator::Hopping { left, coefficient } => psi.apply_hopping(*left, coefficient * self.time),
            Generator::Pauli { string, coefficient } => psi.apply_pauli_rotation(string, coefficient * self.time),
            Generator::Diagonal { energies, .. } => psi.apply_diagonal(energies, self.time),
        }
    }

    fn scaled(&self, s: f64) -> Self {
        Self { generator: self.generator.clone(), time: self.time * s }
    }
}

/// Factors realizing one product-formula step, in application order.
#[derive(Clone, Debug)]
pub struct StepSequence {
    n_sites: usize,
    factors: Vec<Factor>,
}

impl StepSequence {
    pub fn new(n_sites: usize, factors: Vec<Factor>) -> Self {
        Self { n_sites, factors }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn apply(&self, psi: &mut StateVector) -> Result<()> {
        for f in &self.factors {
            f.apply(psi)?;
        }
        Ok(())
    }

    pub fn conserves_charge(&self) -> bool {
        self.factors.iter().all(|f| f.generator.conserves_charge())
    }

    /// Dense step unitary, one column per basis state.
    pub fn unitary(&self) -> Result<DenseOperator> {
        self.unitary_with_limit(DEFAULT_DENSE_LIMIT)
    }

    pub fn unitary_with_limit(&self, limit: usize) -> Result<DenseOperator> {
        if self.n_sites > limit {
            return Err(Error::DenseLimit { n_sites: self.n_sites, limit });
        }
        let dim = 1usize << self.n_sites;
        let cols: Vec<Vec<Complex64>> = (0..dim)
            .into_par_iter()
            .map(|b| {
                let mut psi = StateVector::basis(self.n_sites, b)?;
                self.apply(&mut psi)?;
                Ok(psi.amplitudes().to_vec())
            })
            .collect::<Result<_>>()?;
        let m = DMatrix::from_fn(dim, dim, |r, c| cols[c][r]);
        DenseOperator::new(self.n_sites, m)
    }

    /// Step unitary restricted to the span of `basis`, which must be a union
    /// of charge sectors or otherwise invariant under the step.
    pub fn sector_unitary(&self, basis: &[usize]) -> Result<CMatrix> {
        let pos: std::collections::HashMap<usize, usize> =
            basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let d = basis.len();
        let cols: Vec<Vec<Complex64>> = basis
            .par_iter()
            .map(|&b| {
                let mut psi = StateVector::basis(self.n_sites, b)?;
                self.apply(&mut psi)?;
                let mut col = vec![Complex64::new(0.0, 0.0); d];
                for (idx, a) in psi.amplitudes().iter().enumerate() {
                    match pos.get(&idx) {
                        Some(&r) => col[r] = *a,
                        None if a.norm() > 1e-12 => return Err(Error::ChargeViolation),
                        None => {}
                    }
                }
                Ok(col)
            })
            .collect::<Result<_>>()?;
        Ok(DMatrix::from_fn(d, d, |r, c| cols[c][r]))
    }
}

/// First-order factor list for one step of length `dt`.
pub fn first_order_factors(model: &SchwingerModel, ordering: OrderingScheme, dt: f64) -> Vec<Factor> {
    let n = model.n_sites();
    let hop = |left: usize, coefficient: f64| Factor {
        generator: Generator::Hopping { left, coefficient },
        time: dt,
    };
    let blocks = model.hopping_blocks();
    let odd = blocks.iter().filter(|b| b.left % 2 == 0);
    let even = blocks.iter().filter(|b| b.left % 2 == 1);
    match ordering {
        OrderingScheme::OE1 => {
            let mut f: Vec<Factor> = odd.chain(even).map(|b| hop(b.left, b.coefficient)).collect();
            f.push(Factor { generator: Generator::diagonal(model.diagonal()), time: dt });
            f
        }
        OrderingScheme::OE2 => {
            let mut f = Vec::new();
            let mut rest = model.h_z();
            for b in odd.chain(even) {
                f.push(hop(b.left, b.coefficient));
                let c = model.zz_coefficient(b.left, b.left + 1);
                if c != 0.0 {
                    f.push(Factor {
                        generator: Generator::Pauli {
                            string: PauliString::from_sparse(n, &[(b.left, Pauli::Z), (b.left + 1, Pauli::Z)]),
                            coefficient: c,
                        },
                        time: dt,
                    });
                }
            }
            for p in model.zz_pairs().iter().filter(|p| p.second - p.first >= 2) {
                rest.add(&model.h_zz_pair(p)).expect("same register");
            }
            f.push(Factor { generator: Generator::diagonal(rest), time: dt });
            f
        }
        OrderingScheme::XYZ => {
            let mut f = Vec::new();
            for axis in [Pauli::X, Pauli::Y] {
                for b in blocks {
                    f.push(Factor {
                        generator: Generator::Pauli {
                            string: PauliString::from_sparse(n, &[(b.left, axis), (b.left + 1, axis)]),
                            coefficient: b.coefficient,
                        },
                        time: dt,
                    });
                }
            }
            f.push(Factor { generator: Generator::diagonal(model.diagonal()), time: dt });
            f
        }
    }
}

pub fn validate_order(order_p: usize) -> Result<()> {
    if order_p == 1 || (order_p >= 2 && order_p % 2 == 0) {
        Ok(())
    } else {
        Err(Error::InvalidOrder(order_p))
    }
}

/// Suzuki's recursion weight `u_p = 1/(4 − 4^{1/(p−1)})`.
pub fn suzuki_weight(order_p: usize) -> f64 {
    1.0 / (4.0 - 4f64.powf(1.0 / (order_p as f64 - 1.0)))
}

fn product_formula(base: &[Factor], order_p: usize, scale: f64) -> Vec<Factor> {
    match order_p {
        1 => base.iter().map(|f| f.scaled(scale)).collect(),
        2 => {
            let half: Vec<Factor> = base.iter().map(|f| f.scaled(0.5 * scale)).collect();
            half.iter().cloned().chain(half.iter().rev().cloned()).collect()
        }
        p => {
            let u = suzuki_weight(p);
            let outer = product_formula(base, p - 2, u * scale);
            let inner = product_formula(base, p - 2, (1.0 - 4.0 * u) * scale);
            let mut out = Vec::with_capacity(4 * outer.len() + inner.len());
            out.extend(outer.iter().cloned());
            out.extend(outer.iter().cloned());
            out.extend(inner);
            out.extend(outer.iter().cloned());
            out.extend(outer);
            out
        }
    }
}

pub fn build_step(
    model: &SchwingerModel,
    ordering: OrderingScheme,
    order_p: usize,
    dt: f64,
) -> Result<StepSequence> {
    validate_order(order_p)?;
    if !dt.is_finite() {
        return Err(Error::InvalidPlan(format!("dt must be finite, got {dt}")));
    }
    let base = first_order_factors(model, ordering, dt);
    Ok(StepSequence::new(model.n_sites(), product_formula(&base, order_p, 1.0)))
}

/// Per-step protection angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Protection {
    Angles(Vec<f64>),
    Random { random: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub ordering: OrderingScheme,
    #[serde(rename = "p")]
    pub order_p: usize,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub protection: Option<Protection>,
}

impl TrotterPlan {
    pub fn new(ordering: OrderingScheme, order_p: usize, dt: f64, steps: usize) -> Self {
        Self { ordering, order_p, dt, steps, protection: None }
    }

    pub fn with_protection(mut self, protection: Protection) -> Self {
        self.protection = Some(protection);
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_order(self.order_p)?;
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidPlan(format!("dt must be positive, got {}", self.dt)));
        }
        if let Some(Protection::Angles(a)) = &self.protection {
            if a.len() != self.steps {
                return Err(Error::InvalidPlan(format!(
                    "{} protection angles for {} steps",
                    a.len(),
                    self.steps
                )));
            }
        }
        Ok(())
    }

    /// Resolved angle schedule, if any.
    pub fn angles(&self) -> Result<Option<Vec<f64>>> {
        self.validate()?;
        Ok(match &self.protection {
            None => None,
            Some(Protection::Angles(a)) => Some(a.clone()),
            Some(Protection::Random { random }) => Some(random_angle_schedule(self.steps, *random)),
        })
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

/// Applies `step` `angles.len()` times, conjugating step `k` by `C(α_k)`.
fn run_steps(
    step: &StepSequence,
    psi0: &StateVector,
    steps: usize,
    angles: Option<&[f64]>,
    mut visit: impl FnMut(&StateVector),
) -> Result<()> {
    let mut psi = psi0.clone();
    visit(&psi);
    for k in 0..steps {
        match angles {
            Some(a) if a[k] != 0.0 => {
                psi.apply_charge_rotation(a[k]);
                step.apply(&mut psi)?;
                psi.apply_charge_rotation(-a[k]);
            }
            _ => step.apply(&mut psi)?,
        }
        visit(&psi);
    }
    Ok(())
}

/// States after each of `plan.steps` steps, starting with `psi0`.
pub fn evolve(model: &SchwingerModel, psi0: &StateVector, plan: &TrotterPlan) -> Result<Vec<StateVector>> {
    if psi0.n_sites() != model.n_sites() {
        return Err(Error::SiteMismatch { left: psi0.n_sites(), right: model.n_sites() });
    }
    let angles = plan.angles()?;
    let step = build_step(model, plan.ordering, plan.order_p, plan.dt)?;
    let mut out = Vec::with_capacity(plan.steps + 1);
    run_steps(&step, psi0, plan.steps, angles.as_deref(), |s| out.push(s.clone()))?;
    Ok(out)
}

/// Dense `C†(α) S C(α)` for a step sequence.
pub fn protected_step_unitary(step: &StepSequence, alpha: f64) -> Result<DenseOperator> {
    let u = step.unitary()?;
    let n = step.n_sites();
    let phase = |b: usize| {
        let q = n as f64 - 2.0 * b.count_ones() as f64;
        Complex64::from_polar(1.0, -0.5 * alpha * q)
    };
    let dim = u.dim();
    let m = DMatrix::from_fn(dim, dim, |r, c| phase(r).conj() * u.matrix()[(r, c)] * phase(c));
    DenseOperator::new(n, m)
}

/// `D = ∏_k exp(−iδt H^ZZ_{2k−1,2k})`, with `S_oe1 = D S_oe2 D†`.
pub fn oe_equivalence_conjugator(model: &SchwingerModel, dt: f64) -> Result<DenseOperator> {
    let n = model.n_sites();
    if n > DEFAULT_DENSE_LIMIT {
        return Err(Error::DenseLimit { n_sites: n, limit: DEFAULT_DENSE_LIMIT });
    }
    let mut gen = TermSum::new(n);
    for q in (0..n).step_by(2) {
        let c = model.zz_coefficient(q, q + 1);
        if c != 0.0 {
            gen.add_term(PauliTerm::new(
                c,
                PauliString::from_sparse(n, &[(q, Pauli::Z), (q + 1, Pauli::Z)]),
            ))?;
        }
    }
    let e = diagonal_energies(&gen);
    let dim = 1usize << n;
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, -dt * e[r])
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DenseOperator::new(n, m)
}

/// Uniform draws from `[0, 2π)`, reproducible in `seed`.
pub fn random_angle_schedule(steps: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..steps).map(|_| rng.random::<f64>() * 2.0 * PI).collect()
}

/// `α_k = k α_1` for `k = 1..=steps`.
pub fn linear_schedule(alpha1: f64, steps: usize) -> Vec<f64> {
    (1..=steps).map(|k| k as f64 * alpha1).collect()
}

/// Number of steps `t/dt`, rejecting non-integral ratios.
pub fn integral_steps(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && t >= 0.0 && t.is_finite()) {
        return Err(Error::NonIntegralSteps { t, dt });
    }
    let r = t / dt;
    let rounded = r.round();
    if (r - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::NonIntegralSteps { t, dt });
    }
    Ok(rounded as usize)
}

/// Final-time population outside the bare vacuum's charge sector.
pub fn protected_leakage(step: &StepSequence, steps: usize, angles: &[f64]) -> Result<f64> {
    let n = step.n_sites();
    let psi0 = StateVector::basis(n, bare_vacuum_index(n))?;
    let mut last = None;
    run_steps(step, &psi0, steps, Some(angles), |s| last = Some(s.clone()))?;
    Ok(state_leakage(&last.expect("at least the initial state"), 0))
}

/// Leakage at time `t` under `α_k = k α_1` for each `α_1` on a uniform grid
/// over `[0, 2π)`, first-order product formula.
pub fn alpha_sweep(
    model: &SchwingerModel,
    ordering: OrderingScheme,
    dt: f64,
    t: f64,
    grid_points: usize,
) -> Result<Vec<(f64, f64)>> {
    let steps = integral_steps(t, dt)?;
    let step = build_step(model, ordering, 1, dt)?;
    (0..grid_points)
        .into_par_iter()
        .map(|i| {
            let a = 2.0 * PI * i as f64 / grid_points as f64;
            Ok((a, protected_leakage(&step, steps, &linear_schedule(a, steps))?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaOptimum {
    pub alpha1: f64,
    pub leakage: f64,
    /// Every grid-local minimum `(α_1, leakage)`, ascending in angle.
    pub local_minima: Vec<(f64, f64)>,
}

/// Grid values within this of the global minimum count as ties.
pub const ALPHA_TIE_TOLERANCE: f64 = 1e-10;

const GOLDEN_TOLERANCE: f64 = 1e-6;

/// Smallest `α_1` minimizing the final-time leakage, refined by golden-section
/// search around the best grid point.
pub fn optimize_alpha1(
    model: &SchwingerModel,
    ordering: OrderingScheme,
    dt: f64,
    t: f64,
    grid_points: usize,
) -> Result<AlphaOptimum> {
    if grid_points < 1000 {
        return Err(Error::InvalidPlan(format!("grid_points must be at least 1000, got {grid_points}")));
    }
    let steps = integral_steps(t, dt)?;
    let sweep = alpha_sweep(model, ordering, dt, t, grid_points)?;
    let min = sweep.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let (best_i, &(grid_alpha, grid_leak)) = sweep
        .iter()
        .enumerate()
        .find(|(_, p)| p.1 <= min + ALPHA_TIE_TOLERANCE)
        .expect("non-empty grid");

    let n = sweep.len();
    let local_minima = (0..n)
        .filter(|&i| {
            let (l, r) = (sweep[(i + n - 1) % n].1, sweep[(i + 1) % n].1);
            sweep[i].1 < l - ALPHA_TIE_TOLERANCE && sweep[i].1 <= r
        })
        .map(|i| sweep[i])
        .collect();

    let step = build_step(model, ordering, 1, dt)?;
    let h = 2.0 * PI / grid_points as f64;
    let f = |a: f64| protected_leakage(&step, steps, &linear_schedule(a, steps));
    let lo = if best_i == 0 { 0.0 } else { grid_alpha - h };
    let (ra, rl) = golden_section(f, lo, grid_alpha + h, GOLDEN_TOLERANCE)?;
    let (alpha1, leakage) = if rl < grid_leak - ALPHA_TIE_TOLERANCE {
        (ra, rl)
    } else {
        (grid_alpha, grid_leak)
    };
    Ok(AlphaOptimum { alpha1, leakage, local_minima })
}

fn golden_section(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelParams};

    fn model(n: usize) -> SchwingerModel {
        build_model(ModelParams::new(n, 0.6, 0.1).unwrap()).unwrap()
    }

    #[test]
    fn two_site_oe1_has_one_block_and_the_diagonal() {
        let s = build_step(&model(2), OrderingScheme::OE1, 1, 0.5).unwrap();
        assert_eq!(s.factors().len(), 2);
        assert!(matches!(s.factors()[0].generator, Generator::Hopping { left: 0, .. }));
        match &s.factors()[1].generator {
            Generator::Diagonal { terms, .. } => {
                assert_eq!(terms.len(), 2);
                assert!(terms.iter().all(|t| t.string.weight() == 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn oe1_puts_odd_blocks_first() {
        let s = build_step(&model(6), OrderingScheme::OE1, 1, 1.0).unwrap();
        let lefts: Vec<usize> = s
            .factors()
            .iter()
            .filter_map(|f| match f.generator {
                Generator::Hopping { left, .. } => Some(left),
                _ => None,
            })
            .collect();
        assert_eq!(lefts, vec![0, 2, 4, 1, 3]);
    }

    #[test]
    fn even_orders_only() {
        assert!(matches!(build_step(&model(2), OrderingScheme::OE1, 3, 0.1), Err(Error::InvalidOrder(3))));
        assert!(build_step(&model(2), OrderingScheme::OE1, 0, 0.1).is_err());
        assert!(build_step(&model(2), OrderingScheme::OE1, 4, 0.1).is_ok());
    }

    #[test]
    fn second_order_is_a_palindrome() {
        let s = build_step(&model(4), OrderingScheme::XYZ, 2, 0.3).unwrap();
        let k = s.factors().len();
        for i in 0..k / 2 {
            assert_eq!(s.factors()[i].time, s.factors()[k - 1 - i].time);
        }
        assert_eq!(s.factors()[0].time, 0.15);
    }

    #[test]
    fn fourth_order_weights_sum_to_one_step() {
        let s = build_step(&model(2), OrderingScheme::OE1, 4, 0.2).unwrap();
        let total: f64 = s
            .factors()
            .iter()
            .filter(|f| matches!(f.generator, Generator::Hopping { .. }))
            .map(|f| f.time)
            .sum();
        assert!((total - 0.2).abs() < 1e-14);
    }

    #[test]
    fn ordering_parses() {
        assert_eq!("OE1".parse::<OrderingScheme>().unwrap(), OrderingScheme::OE1);
        assert_eq!("xyz".parse::<OrderingScheme>().unwrap(), OrderingScheme::XYZ);
        assert!("abc".parse::<OrderingScheme>().is_err());
        assert_eq!(serde_json::to_string(&OrderingScheme::OE2).unwrap(), "\"oe2\"");
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let m = model(2);
        let psi0 = crate::model::bare_vacuum(m.params()).unwrap();
        let traj = evolve(&m, &psi0, &TrotterPlan::new(OrderingScheme::OE1, 1, 0.5, 0)).unwrap();
        assert_eq!(traj, vec![psi0]);
    }

    #[test]
    fn plan_validation() {
        let plan = TrotterPlan::new(OrderingScheme::OE1, 1, 0.5, 3).with_protection(Protection::Angles(vec![0.1]));
        assert!(plan.validate().is_err());
        assert!(TrotterPlan::new(OrderingScheme::OE1, 1, -0.5, 3).validate().is_err());
        let json = r#"{"ordering":"xyz","p":2,"dt":0.5,"steps":2,"protection":{"random":7}}"#;
        let plan: TrotterPlan = serde_json::from_str(json).unwrap();
        assert_eq!(plan.angles().unwrap().unwrap(), random_angle_schedule(2, 7));
        let plan: TrotterPlan = serde_json::from_str(r#"{"ordering":"oe1","p":1,"dt":1,"steps":1,"protection":null}"#).unwrap();
        assert_eq!(plan.angles().unwrap(), None);
    }

    #[test]
    fn random_schedule_is_reproducible_and_in_range() {
        let a = random_angle_schedule(50, 11);
        assert_eq!(a, random_angle_schedule(50, 11));
        assert!(a.iter().all(|&x| (0.0..2.0 * PI).contains(&x)));
    }

    #[test]
    fn integral_step_counts() {
        assert_eq!(integral_steps(4.0, 1.0).unwrap(), 4);
        assert_eq!(integral_steps(19.5, 0.5).unwrap(), 39);
        assert!(matches!(integral_steps(1.25, 0.5), Err(Error::NonIntegralSteps { .. })));
    }

    #[test]
    fn optimizer_requires_a_fine_grid() {
        assert!(optimize_alpha1(&model(4), OrderingScheme::XYZ, 1.0, 2.0, 10).is_err());
    }
}
