//! Independent dense oracles: Kronecker-product operators and a Taylor-series
//! matrix exponential, sharing no code with the library's kernels.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schwinger_core::{build_model, ModelParams, SchwingerModel, StateVector};

pub type M = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn single(axis: char) -> M {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match axis {
        'I' => M::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => M::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => M::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => M::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("bad axis {axis}"),
    }
}

/// `axes[0] ⊗ axes[1] ⊗ …`, site 0 leftmost.
pub fn kron_string(axes: &str) -> M {
    axes.chars().fold(M::identity(1, 1), |acc, a| acc.kronecker(&single(a)))
}

/// Operator `axis` on `site` of an `n`-site register.
pub fn on_site(n: usize, site: usize, axis: char) -> M {
    let s: String = (0..n).map(|q| if q == site { axis } else { 'I' }).collect();
    kron_string(&s)
}

pub fn identity(n: usize) -> M {
    M::identity(1 << n, 1 << n)
}

/// The spin Hamiltonian written out literally, constant included, with
/// hopping prefactor `hop` (x for the printed form, x/2 for the ladder form).
pub fn literal_hamiltonian(n: usize, hop: f64, mu: f64) -> M {
    let dim = 1 << n;
    let mut h = M::zeros(dim, dim);
    for q in 0..n - 1 {
        let xx = on_site(n, q, 'X') * on_site(n, q + 1, 'X');
        let yy = on_site(n, q, 'Y') * on_site(n, q + 1, 'Y');
        h += (xx + yy) * c(hop, 0.0);
    }
    let sign = |site: usize| if site % 2 == 0 { 1.0 } else { -1.0 };
    for k in 1..n {
        // Σ_{m=1}^{k} (Z_m + (−1)^m), sites 1-based
        let mut s = M::zeros(dim, dim);
        for m in 1..=k {
            s += on_site(n, m - 1, 'Z') + identity(n) * c(sign(m), 0.0);
        }
        h += (&s * &s) * c(0.25, 0.0);
    }
    for m in 1..=n {
        h += (on_site(n, m - 1, 'Z') + identity(n)) * c(mu * sign(m) / 2.0, 0.0);
    }
    h
}

pub fn s_z(n: usize) -> M {
    (0..n).fold(M::zeros(1 << n, 1 << n), |acc, q| acc + on_site(n, q, 'Z'))
}

/// `exp(−i t H)` by scaling and squaring a Taylor series.
pub fn expm_i(h: &M, t: f64) -> M {
    let a = h * c(0.0, -t);
    let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>().max(1e-300);
    let squarings = (norm.log2().ceil().max(0.0) as u32) + 4;
    let a = a / c(2f64.powi(squarings as i32), 0.0);
    let dim = h.nrows();
    let mut term = M::identity(dim, dim);
    let mut sum = M::identity(dim, dim);
    for k in 1..30 {
        term = &term * &a / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

pub fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn model(n: usize) -> SchwingerModel {
    build_model(ModelParams::new(n, 0.6, 0.1).unwrap()).unwrap()
}

pub fn random_state(n: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    StateVector::normalized(n, amps).unwrap()
}

pub fn as_column(psi: &StateVector) -> M {
    M::from_column_slice(psi.dim(), 1, psi.amplitudes())
}
