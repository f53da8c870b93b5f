//! Compilation of one OE1 step into trapped-ion native gates.
//!
//! Gate conventions: `Z(θ) = e^{−iθZ/2}`, `R(θ, φ) = e^{−iθ(cos φ X + sin φ Y)/2}`,
//! `XX(χ) = e^{−iχ X⊗X}`.
//!
//! Layout of a step, in application order:
//! 1. each hopping pair (odd blocks, then even): `XX(cδt)`, then `YY(cδt)` as
//!    `Z(−π/2)² · XX · Z(π/2)²`;
//! 2. the ZZ layer: one `R(π/2, π/2)` on every qubit, `XX(cδt)` per pair, one
//!    `R(−π/2, π/2)` on every qubit. Because the basis change is shared by all
//!    pairs it costs `2N` R gates regardless of how many pairs there are, and
//!    is skipped when there are none;
//! 3. the Z layer: one `Z(2cδt)` per site.

use std::fmt;
use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{matrix_spectral_norm, DenseOperator, DEFAULT_DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::model::SchwingerModel;
use crate::state::StateVector;
use crate::trotter::{OrderingScheme, StepSequence};

const HALF_PI: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NativeGate {
    Z { qubit: usize, theta: f64 },
    R { qubit: usize, theta: f64, phi: f64 },
    XX { first: usize, second: usize, chi: f64 },
}

impl NativeGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            NativeGate::Z { qubit, .. } | NativeGate::R { qubit, .. } => vec![qubit],
            NativeGate::XX { first, second, .. } => vec![first, second],
        }
    }
}

impl fmt::Display for NativeGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NativeGate::XX { first, second, chi } => write!(f, "XX {first} {second} {chi:.16e}"),
            NativeGate::R { qubit, theta, phi } => write!(f, "R {qubit} {theta:.16e} {phi:.16e}"),
            NativeGate::Z { qubit, theta } => write!(f, "Z {qubit} {theta:.16e}"),
        }
    }
}

/// `Z(θ)` angle realizing `e^{−i·coefficient·dt·Z}`.
pub fn z_angle(coefficient: f64, dt: f64) -> f64 {
    2.0 * coefficient * dt
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCount {
    pub xx: usize,
    pub r: usize,
    pub z: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NativeCircuit {
    n_sites: usize,
    gates: Vec<NativeGate>,
}

impl NativeCircuit {
    pub fn new(n_sites: usize) -> Self {
        Self { n_sites, gates: Vec::new() }
    }

    pub fn from_gates(n_sites: usize, gates: Vec<NativeGate>) -> Result<Self> {
        let mut c = Self::new(n_sites);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: NativeGate) -> Result<()> {
        let qs = gate.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= self.n_sites) {
            return Err(Error::IndexOutOfRange { index: q, len: self.n_sites });
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::InvalidPlan(format!("XX gate on a single qubit {}", qs[0])));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn gates(&self) -> &[NativeGate] {
        &self.gates
    }

    pub fn apply(&self, psi: &mut StateVector) -> Result<()> {
        for g in &self.gates {
            psi.apply_native(g)?;
        }
        Ok(())
    }

    pub fn unitary(&self) -> Result<DenseOperator> {
        if self.n_sites > DEFAULT_DENSE_LIMIT {
            return Err(Error::DenseLimit { n_sites: self.n_sites, limit: DEFAULT_DENSE_LIMIT });
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
        DenseOperator::new(self.n_sites, DMatrix::from_fn(dim, dim, |r, c| cols[c][r]))
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# qubits {}", self.n_sites)?;
        for g in &self.gates {
            writeln!(w, "{g}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the line format written by [`write_text`](Self::write_text).
    /// Blank lines and `#` comments are skipped.
    pub fn read_text<R: BufRead>(n_sites: usize, r: R) -> Result<Self> {
        let mut c = Self::new(n_sites);
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: i + 1, msg: msg.to_string() };
            let f: Vec<&str> = line.split_whitespace().collect();
            let q = |s: &str| s.parse::<usize>().map_err(|_| err("bad qubit index"));
            let a = |s: &str| s.parse::<f64>().map_err(|_| err("bad angle"));
            let gate = match f.as_slice() {
                ["XX", i, j, chi] => NativeGate::XX { first: q(i)?, second: q(j)?, chi: a(chi)? },
                ["R", i, theta, phi] => NativeGate::R { qubit: q(i)?, theta: a(theta)?, phi: a(phi)? },
                ["Z", i, theta] => NativeGate::Z { qubit: q(i)?, theta: a(theta)? },
                _ => return Err(err("expected `XX q q chi`, `R q theta phi` or `Z q theta`")),
            };
            c.push(gate).map_err(|e| err(&e.to_string()))?;
        }
        Ok(c)
    }
}

/// Two-qubit gates in one compiled OE1 step: `2(N−1) + C(N−1, 2)`.
pub fn xx_per_step(n_sites: usize) -> usize {
    let m = n_sites.saturating_sub(1);
    2 * m + m * m.saturating_sub(1) / 2
}

pub fn count_gates(circuit: &NativeCircuit) -> GateCount {
    let mut n = GateCount::default();
    for g in circuit.gates() {
        match g {
            NativeGate::XX { .. } => n.xx += 1,
            NativeGate::R { .. } => n.r += 1,
            NativeGate::Z { .. } => n.z += 1,
        }
    }
    n
}

/// First-order OE1 step as native gates.
pub fn compile_step(model: &SchwingerModel, ordering: OrderingScheme, dt: f64) -> Result<NativeCircuit> {
    if ordering != OrderingScheme::OE1 {
        return Err(Error::UnsupportedOrdering(ordering.to_string()));
    }
    let n = model.n_sites();
    let mut c = NativeCircuit::new(n);
    let blocks = model.hopping_blocks();
    for b in blocks.iter().filter(|b| b.left % 2 == 0).chain(blocks.iter().filter(|b| b.left % 2 == 1)) {
        let (i, j, chi) = (b.left, b.left + 1, b.coefficient * dt);
        c.push(NativeGate::XX { first: i, second: j, chi })?;
        c.push(NativeGate::Z { qubit: i, theta: -HALF_PI })?;
        c.push(NativeGate::Z { qubit: j, theta: -HALF_PI })?;
        c.push(NativeGate::XX { first: i, second: j, chi })?;
        c.push(NativeGate::Z { qubit: i, theta: HALF_PI })?;
        c.push(NativeGate::Z { qubit: j, theta: HALF_PI })?;
    }
    if !model.zz_pairs().is_empty() {
        for q in 0..n {
            c.push(NativeGate::R { qubit: q, theta: HALF_PI, phi: HALF_PI })?;
        }
        for p in model.zz_pairs() {
            c.push(NativeGate::XX { first: p.first, second: p.second, chi: p.coefficient() * dt })?;
        }
        for q in 0..n {
            c.push(NativeGate::R { qubit: q, theta: -HALF_PI, phi: HALF_PI })?;
        }
    }
    for (q, coef) in model.z_coefficients().into_iter().enumerate() {
        c.push(NativeGate::Z { qubit: q, theta: z_angle(coef, dt) })?;
    }
    Ok(c)
}

/// Z-layer angle `(a + bμ)·δt` as the integer pair `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymbolicZAngle {
    pub constant: i64,
    pub mu: i64,
}

/// Exact Z-layer angles, one per site, in units of δt.
pub fn symbolic_z_angles(model: &SchwingerModel) -> Vec<SymbolicZAngle> {
    // z_angle doubles the coefficient (half_units + mu_sign·μ)/2.
    model
        .z_profile()
        .iter()
        .map(|z| SymbolicZAngle { constant: z.half_units, mu: z.mu_sign })
        .collect()
}

/// Phase-aligned spectral distance between the circuit and a reference step.
pub fn verify_circuit(circuit: &NativeCircuit, reference: &StepSequence) -> Result<f64> {
    if circuit.n_sites() != reference.n_sites() {
        return Err(Error::DimensionMismatch {
            left: 1 << circuit.n_sites(),
            right: 1 << reference.n_sites(),
        });
    }
    let uc = circuit.unitary()?.into_matrix();
    let ur = reference.unitary()?.into_matrix();
    let overlap = (ur.adjoint() * &uc).trace();
    let phase = if overlap.norm() > 0.0 {
        Complex64::from_polar(1.0, -overlap.arg())
    } else {
        Complex64::new(1.0, 0.0)
    };
    matrix_spectral_norm(&(uc * phase - ur))
}
