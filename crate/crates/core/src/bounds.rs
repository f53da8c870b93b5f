//! Trotter error bounds and step-count estimates.
//!
//! Terms are grouped as `ĥ_1..ĥ_K`: the odd hopping blocks, then the even
//! ones, then the whole diagonal part `H^ZZ + H^Z` as `ĥ_K`.
//!
//! Any bound of the form `B(δt) = c·δt^{p+1}` turns into a step count by
//! requiring the accumulated error `r·B(t/r) = c·t^{p+1}/r^p ≤ ε`, i.e.
//! `r = ⌈t·(c·t/ε)^{1/p}⌉`.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::compiler::xx_per_step;
use crate::dense::{conserving_spectral_norm, matrix_spectral_norm, CMatrix, DEFAULT_DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::model::SchwingerModel;
use crate::pauli::{commutator, TermSum};
use crate::state::ExactPropagator;
use crate::trotter::{build_step, validate_order, OrderingScheme};

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// `ĥ_1..ĥ_K` in bound order, diagonal part last.
pub fn bound_groups(model: &SchwingerModel) -> Vec<TermSum> {
    let blocks = model.hopping_blocks().len();
    let mut g: Vec<TermSum> = (0..blocks)
        .step_by(2)
        .chain((1..blocks).step_by(2))
        .map(|k| model.h_x_pair(k))
        .collect();
    g.push(model.diagonal());
    g
}

/// `κ_p = (4·5^{p/2−1})^{p+1}`.
pub fn kappa(order_p: usize) -> f64 {
    let p = order_p as f64;
    (4.0 * 5f64.powf(p / 2.0 - 1.0)).powf(p + 1.0)
}

/// How the per-site interaction strength `λ` is read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaReading {
    /// Sum of coefficient magnitudes of all Pauli terms touching a site.
    #[default]
    CoefficientSum,
    /// Spectral norm of the sum of the terms touching a site.
    LocalOperatorNorm,
}

/// Maximum over sites of the interaction strength acting on that site.
pub fn lambda(model: &SchwingerModel, reading: LambdaReading) -> Result<f64> {
    let h = model.hamiltonian();
    let n = model.n_sites();
    let mut best = 0.0f64;
    for q in 0..n {
        let local: Vec<_> = h.iter().filter(|t| t.string.support().contains(&q)).collect();
        let v = match reading {
            LambdaReading::CoefficientSum => local.iter().map(|t| t.coefficient.norm()).sum(),
            LambdaReading::LocalOperatorNorm => conserving_spectral_norm(&TermSum::from_terms(n, local)?)?,
        };
        best = best.max(v);
    }
    Ok(best)
}

/// `γ = Σ_{k<K} ‖ĥ_k‖`.
pub fn gamma(groups: &[TermSum]) -> Result<f64> {
    let Some((_, rest)) = groups.split_last() else {
        return Err(Error::EmptyModel);
    };
    rest.iter().map(conserving_spectral_norm).sum()
}

/// `κ_p γ λ^p`, so that the one-step bound is this times `δt^{p+1}`.
pub fn closed_form_prefactor(model: &SchwingerModel, order_p: usize, reading: LambdaReading) -> Result<f64> {
    validate_order(order_p)?;
    let g = gamma(&bound_groups(model))?;
    Ok(kappa(order_p) * g * lambda(model, reading)?.powi(order_p as i32))
}

pub fn closed_form_bound(model: &SchwingerModel, order_p: usize, dt: f64, reading: LambdaReading) -> Result<f64> {
    Ok(closed_form_prefactor(model, order_p, reading)? * dt.powi(order_p as i32 + 1))
}

/// Nested-commutator sum of the second-order bound, without the `δt³`:
/// `Σ_k ‖[ĥ_k,[ĥ_k,R_k]]‖/24 + ‖[R_k,[R_k,ĥ_k]]‖/12` with `R_k = Σ_{j>k} ĥ_j`.
pub fn exact_commutator_prefactor(groups: &[TermSum]) -> Result<f64> {
    if groups.is_empty() {
        return Err(Error::EmptyModel);
    }
    let n = groups[0].n_sites();
    let mut total = 0.0;
    for k in 0..groups.len() - 1 {
        let h = &groups[k];
        let rest = TermSum::sum(n, &groups[k + 1..])?;
        let inner = commutator(h, &rest)?;
        let a = commutator(h, &inner)?;
        let b = commutator(&rest, &commutator(&rest, h)?)?;
        total += norm_of(&a)? / 24.0 + norm_of(&b)? / 12.0;
    }
    Ok(total)
}

fn norm_of(sum: &TermSum) -> Result<f64> {
    if sum.is_empty() {
        Ok(0.0)
    } else {
        conserving_spectral_norm(sum)
    }
}

pub fn exact_commutator_bound(model: &SchwingerModel, order_p: usize, dt: f64) -> Result<f64> {
    if order_p != 2 {
        return Err(Error::InvalidOrder(order_p));
    }
    Ok(exact_commutator_prefactor(&bound_groups(model))? * dt.powi(3))
}

/// Smallest `r` with `c·t^{p+1}/r^p ≤ ε`.
pub fn steps_from_prefactor(prefactor: f64, order_p: usize, t: f64, epsilon: f64) -> usize {
    if prefactor <= 0.0 || t <= 0.0 {
        return 1;
    }
    let r = t * (prefactor * t / epsilon).powf(1.0 / order_p as f64);
    (r.ceil() as usize).max(1)
}

/// Exact-vs-Trotter distance `‖e^{−itH} − S_p(t/r)^r‖` in the OE1 grouping.
pub struct EmpiricalError<'a> {
    model: &'a SchwingerModel,
    order_p: usize,
    t: f64,
    exact: Vec<(Vec<usize>, CMatrix)>,
}

impl<'a> EmpiricalError<'a> {
    pub fn new(model: &'a SchwingerModel, order_p: usize, t: f64, dense_limit: usize) -> Result<Self> {
        validate_order(order_p)?;
        let prop = ExactPropagator::new(model, dense_limit)?;
        let exact = prop
            .sector_unitaries(t)
            .into_iter()
            .map(|(b, u)| (b.to_vec(), u))
            .collect();
        Ok(Self { model, order_p, t, exact })
    }

    pub fn at(&self, r: usize) -> Result<f64> {
        let step = build_step(self.model, OrderingScheme::OE1, self.order_p, self.t / r as f64)?;
        let mut worst = 0.0f64;
        for (basis, u) in &self.exact {
            let s = matrix_power(&step.sector_unitary(basis)?, r);
            worst = worst.max(matrix_spectral_norm(&(u - s))?);
        }
        Ok(worst)
    }
}

fn matrix_power(m: &CMatrix, mut e: usize) -> CMatrix {
    let d = m.nrows();
    let mut acc: CMatrix = DMatrix::identity(d, d);
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Minimal `r` with error ≤ ε: double until it holds, bisect, then confirm
/// that `r − 1` fails.
pub fn empirical_min_steps(model: &SchwingerModel, order_p: usize, t: f64, epsilon: f64) -> Result<usize> {
    empirical_min_steps_with(model, order_p, t, epsilon, DEFAULT_DENSE_LIMIT, DEFAULT_STEP_CAP)
}

pub fn empirical_min_steps_with(
    model: &SchwingerModel,
    order_p: usize,
    t: f64,
    epsilon: f64,
    dense_limit: usize,
    cap: usize,
) -> Result<usize> {
    if order_p > 2 {
        return Err(Error::InvalidOrder(order_p));
    }
    let err = EmpiricalError::new(model, order_p, t, dense_limit)?;
    let ok = |r: usize| err.at(r).map(|e| e <= epsilon);
    let mut hi = 1;
    while !ok(hi)? {
        hi *= 2;
        if hi > cap {
            return Err(Error::StepCap { cap });
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi > 1 && ok(hi - 1)? {
        return Err(Error::InvalidPlan(format!(
            "error is not monotone in r near {hi}: r − 1 also meets the tolerance"
        )));
    }
    Ok(hi)
}

/// Linear scan over `r = 1..=max_r`; the reference for the bisection.
pub fn empirical_min_steps_linear(
    model: &SchwingerModel,
    order_p: usize,
    t: f64,
    epsilon: f64,
    max_r: usize,
) -> Result<Option<usize>> {
    let err = EmpiricalError::new(model, order_p, t, DEFAULT_DENSE_LIMIT)?;
    for r in 1..=max_r {
        if err.at(r)? <= epsilon {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepEstimates {
    pub commutator_bound: usize,
    pub exact_commutator: usize,
    pub empirical: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_sites: usize,
    pub t: f64,
    pub epsilon: f64,
    pub order_p: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub kappa_p: f64,
    /// One-step closed-form bound at `dt`.
    pub closed_form: f64,
    /// One-step nested-commutator bound at `dt` (second order only).
    pub exact_commutator: Option<f64>,
    pub dt: f64,
    pub steps: StepEstimates,
    /// Two-qubit gate totals: steps times the XX count per step.
    pub gate_counts: StepEstimates,
}

/// All three step estimates for evolving to `t` within `epsilon` at second
/// order; `dt` only sets the one-step bound values reported alongside.
pub fn bound_report(
    model: &SchwingerModel,
    t: f64,
    epsilon: f64,
    dt: f64,
    reading: LambdaReading,
    dense_limit: usize,
) -> Result<BoundReport> {
    let p = 2;
    let groups = bound_groups(model);
    let lam = lambda(model, reading)?;
    let gam = gamma(&groups)?;
    let kap = kappa(p);
    let loose = kap * gam * lam.powi(p as i32);
    let tight = exact_commutator_prefactor(&groups)?;
    let steps = StepEstimates {
        commutator_bound: steps_from_prefactor(loose, p, t, epsilon),
        exact_commutator: steps_from_prefactor(tight, p, t, epsilon),
        empirical: empirical_min_steps_with(model, p, t, epsilon, dense_limit, DEFAULT_STEP_CAP)?,
    };
    let g = xx_per_step(model.n_sites());
    Ok(BoundReport {
        n_sites: model.n_sites(),
        t,
        epsilon,
        order_p: p,
        lambda: lam,
        gamma: gam,
        kappa_p: kap,
        closed_form: loose * dt.powi(3),
        exact_commutator: Some(tight * dt.powi(3)),
        dt,
        steps,
        gate_counts: StepEstimates {
            commutator_bound: steps.commutator_bound * g,
            exact_commutator: steps.exact_commutator * g,
            empirical: steps.empirical * g,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln N, ln count)`.
pub fn scaling_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::InvalidFit(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|&(n, c)| !(n > 0.0 && c > 0.0)) {
        return Err(Error::InvalidFit("sizes and counts must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidFit("all sizes are equal".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - exponent * x).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ScalingFit { exponent, intercept, r_squared })
}

pub const METHODS: [&str; 3] = ["commutator_bound", "exact_commutator", "empirical"];

fn by_method(s: &StepEstimates) -> [usize; 3] {
    [s.commutator_bound, s.exact_commutator, s.empirical]
}

/// `N,t,epsilon,method,steps,two_qubit_gates`, three rows per report.
pub fn write_reports_csv<W: Write>(reports: &[BoundReport], mut w: W) -> Result<()> {
    writeln!(w, "N,t,epsilon,method,steps,two_qubit_gates")?;
    for r in reports {
        for ((m, s), g) in METHODS.iter().zip(by_method(&r.steps)).zip(by_method(&r.gate_counts)) {
            writeln!(w, "{},{},{},{},{},{}", r.n_sites, r.t, r.epsilon, m, s, g)?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub method: String,
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Gate-count scaling fit per method across the reports.
pub fn fit_reports(reports: &[BoundReport]) -> Result<Vec<FitSummary>> {
    (0..3)
        .map(|i| {
            let pts: Vec<(f64, f64)> = reports
                .iter()
                .map(|r| (r.n_sites as f64, by_method(&r.gate_counts)[i] as f64))
                .collect();
            let f = scaling_fit(&pts)?;
            Ok(FitSummary {
                method: METHODS[i].to_string(),
                exponent: f.exponent,
                intercept: f.intercept,
                r_squared: f.r_squared,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelParams};

    fn model(n: usize) -> SchwingerModel {
        build_model(ModelParams::new(n, 0.6, 0.1).unwrap()).unwrap()
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(2), 64.0);
        assert!((kappa(4) - 20f64.powi(5)).abs() < 1e-6);
    }

    #[test]
    fn groups_put_diagonal_last() {
        let g = bound_groups(&model(6));
        assert_eq!(g.len(), 6);
        assert!(g.last().unwrap().iter().all(|t| t.string.is_diagonal()));
        assert!(g[0].coefficient(&crate::pauli::PauliString::parse("XXIIII").unwrap()).re > 0.0);
        assert!(g[3].coefficient(&crate::pauli::PauliString::parse("IXXIII").unwrap()).re > 0.0);
    }

    #[test]
    fn zero_dt_gives_zero_bound() {
        assert_eq!(closed_form_bound(&model(4), 2, 0.0, LambdaReading::CoefficientSum).unwrap(), 0.0);
        assert_eq!(exact_commutator_bound(&model(4), 2, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn exact_bound_needs_second_order() {
        assert!(matches!(exact_commutator_bound(&model(4), 4, 0.1), Err(Error::InvalidOrder(4))));
    }

    #[test]
    fn commuting_groups_give_zero() {
        let m = model(4);
        assert_eq!(exact_commutator_prefactor(&[m.h_z(), m.h_zz()]).unwrap(), 0.0);
        assert!(exact_commutator_prefactor(&[]).is_err());
    }

    #[test]
    fn step_formula() {
        assert_eq!(steps_from_prefactor(0.0, 2, 4.0, 0.01), 1);
        // c t^3 / r^2 <= eps with c = 1, t = 2, eps = 0.5 → r ≥ 4
        assert_eq!(steps_from_prefactor(1.0, 2, 2.0, 0.5), 4);
    }

    #[test]
    fn power_law_fit() {
        let pts: Vec<(f64, f64)> = [2.0, 3.0, 5.0, 7.0].iter().map(|&n: &f64| (n, 0.5 * n.powi(3))).collect();
        let f = scaling_fit(&pts).unwrap();
        assert!((f.exponent - 3.0).abs() < 1e-9);
        assert!((f.intercept - 0.5f64.ln()).abs() < 1e-9);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert!(scaling_fit(&pts[..2]).is_err());
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn loose_tolerance_needs_one_step() {
        assert_eq!(empirical_min_steps(&model(4), 2, 4.0, 2.0).unwrap(), 1);
        assert_eq!(empirical_min_steps(&model(4), 2, 1e-9, 0.01).unwrap(), 1);
    }

    #[test]
    fn step_cap_is_a_resource_error() {
        let e = empirical_min_steps_with(&model(4), 1, 4.0, 1e-9, 12, 8).unwrap_err();
        assert!(e.is_resource_limit());
    }
}
