//! The teleportation witness `W = I/d - |psi+><psi+|`.
//!
//! `Tr(W sigma) = 1/d - <psi+|sigma|psi+> >= 1/d - F(sigma)`, so every state
//! with `F <= 1/d` has a non-negative expectation, and a negative expectation
//! certifies `F > 1/d`. The converse does not hold: a non-negative value
//! says nothing about usefulness.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fef::{self, FefEstimate, OptimizerConfig};
use crate::linalg::{self, ComplexMatrix, ComplexVector, I, ONE, ZERO};
use crate::states::{self, check_alphas, check_range, isotropic_beta_min, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UsefulDetected,
    NotDetected,
}

impl Verdict {
    /// Detection needs a strictly negative expectation; zero is not detected.
    pub fn from_expectation(expectation: f64) -> Self {
        if expectation < 0.0 {
            Self::UsefulDetected
        } else {
            Self::NotDetected
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::UsefulDetected => "useful-detected",
            Self::NotDetected => "not-detected",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub expectation: f64,
    pub verdict: Verdict,
    pub fef_hint: Option<FefEstimate>,
    pub d: usize,
}

/// `W = I/d - |psi+><psi+|` on `C^d (x) C^d`.
pub fn witness_operator(d: usize) -> Result<ComplexMatrix> {
    let psi = states::max_entangled_state(d)?;
    ComplexMatrix::identity(d * d)
        .scale(1.0 / d as f64)
        .sub(&ComplexMatrix::projector(&psi))
}

/// Magnitude below which a computed expectation is rounding noise and is
/// reported as exactly zero.
pub const EXPECTATION_ZERO_TOL: f64 = 1e-14;

/// `Tr(W rho) = 1/d - <psi+|rho|psi+>`, with rounding noise below
/// [`EXPECTATION_ZERO_TOL`] flushed to zero so threshold states are not detected.
pub fn witness_expectation(rho: &DensityMatrix) -> f64 {
    let d = rho.d();
    let psi = states::max_entangled_state(d).expect("validated state has d >= 2");
    let value = 1.0 / d as f64 - rho.expectation_in(&psi);
    if value.abs() < EXPECTATION_ZERO_TOL {
        0.0
    } else {
        value
    }
}

/// Evaluates the witness and, on request, attaches an FEF estimate
/// (exact at `d = 2`, optimizer otherwise).
pub fn classify(
    rho: &DensityMatrix,
    with_fef: bool,
    config: &OptimizerConfig,
) -> Result<WitnessReport> {
    let expectation = witness_expectation(rho);
    let fef_hint = if with_fef {
        Some(fef::fef(rho, config)?)
    } else {
        None
    };
    Ok(WitnessReport {
        expectation,
        verdict: Verdict::from_expectation(expectation),
        fef_hint,
        d: rho.d(),
    })
}

/// Closed form `(d-1)(1 - beta(d+1))/d^2` on the isotropic family.
pub fn isotropic_expectation(d: usize, beta: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::Dimension { d, min: 2 });
    }
    check_range("beta", beta, isotropic_beta_min(d), 1.0)?;
    let df = d as f64;
    Ok((df - 1.0) * (1.0 - beta * (df + 1.0)) / (df * df))
}

/// Closed form `1/d - (1-v)/d^2 - (v/d) (sum alpha_i)^2` on the
/// generalized Werner family with real amplitudes.
pub fn werner_expectation(d: usize, v: f64, alphas: &[f64]) -> Result<f64> {
    if d < 2 {
        return Err(Error::Dimension { d, min: 2 });
    }
    check_range("v", v, 0.0, 1.0)?;
    check_alphas(d, alphas)?;
    let df = d as f64;
    let sum: f64 = alphas.iter().sum();
    Ok(1.0 / df - (1.0 - v) / (df * df) - v / df * sum * sum)
}

/// Closed form `1/2 - h(C) - C/2` on the MEMS family.
pub fn mems_expectation(concurrence: f64) -> Result<f64> {
    check_range("concurrence", concurrence, 0.0, 1.0)?;
    Ok(0.5 - states::mems_h(concurrence) - concurrence / 2.0)
}

/// Closed form `a/2` on the discord family.
pub fn discord_expectation(a: f64) -> Result<f64> {
    check_range("a", a, 0.0, 1.0)?;
    Ok(a / 2.0)
}

/// One weighted product term `c * (A (x) B)`.
#[derive(Debug, Clone)]
pub struct LocalTerm {
    pub coefficient: f64,
    pub label_a: String,
    pub label_b: String,
    pub op_a: ComplexMatrix,
    pub op_b: ComplexMatrix,
}

/// The witness written as a sum of local product operators.
#[derive(Debug, Clone)]
pub struct LocalDecomposition {
    pub terms: Vec<LocalTerm>,
}

impl LocalDecomposition {
    /// `sum_k c_k (A_k (x) B_k)`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut iter = self.terms.iter().map(|t| linalg::kron(&t.op_a, &t.op_b).scale(t.coefficient));
        let first = iter.next().expect("decomposition has at least one term");
        iter.fold(first, |acc, m| acc.add(&m).expect("terms share one shape"))
    }

    /// `sum_k c_k Tr((A_k (x) B_k) rho)`, one local expectation per term.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        let mut total = 0.0;
        for t in &self.terms {
            let op = linalg::kron(&t.op_a, &t.op_b);
            total += t.coefficient * rho.expectation_of(&op)?.re;
        }
        Ok(total)
    }

    /// Distinct pairs of local labels excluding the identity-identity term.
    pub fn measurement_settings(&self) -> usize {
        let mut seen: Vec<(&str, &str)> = self
            .terms
            .iter()
            .filter(|t| !(t.label_a == "I" && t.label_b == "I"))
            .map(|t| (t.label_a.as_str(), t.label_b.as_str()))
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

fn mat2(entries: [Complex64; 4]) -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, &entries).expect("finite constant")
}

pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn pauli_x() -> ComplexMatrix {
    mat2([ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> ComplexMatrix {
    mat2([ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    mat2([ONE, ZERO, ZERO, -ONE])
}

fn term(coefficient: f64, label_a: &str, label_b: &str, op_a: ComplexMatrix, op_b: ComplexMatrix) -> LocalTerm {
    LocalTerm {
        coefficient,
        label_a: label_a.into(),
        label_b: label_b.into(),
        op_a,
        op_b,
    }
}

/// `W = (I(x)I - X(x)X + Y(x)Y - Z(x)Z)/4` for two qubits.
pub fn pauli_decomposition() -> LocalDecomposition {
    LocalDecomposition {
        terms: vec![
            term(0.25, "I", "I", pauli_i(), pauli_i()),
            term(-0.25, "X", "X", pauli_x(), pauli_x()),
            term(0.25, "Y", "Y", pauli_y(), pauli_y()),
            term(-0.25, "Z", "Z", pauli_z(), pauli_z()),
        ],
    }
}

/// Polarization states `H, V, D, F, L, R` as `(label, ket)`.
pub fn polarization_states() -> [(&'static str, ComplexVector); 6] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ket = |a: Complex64, b: Complex64| ComplexVector::new(&[a, b]).expect("finite constant");
    let r = Complex64::new(s, 0.0);
    let ri = Complex64::new(0.0, s);
    [
        ("H", ket(ONE, ZERO)),
        ("V", ket(ZERO, ONE)),
        ("D", ket(r, r)),
        ("F", ket(r, -r)),
        ("L", ket(r, ri)),
        ("R", ket(r, -ri)),
    ]
}

/// `W = (HV + VH - DD - FF + LL + RR)/2` in product projectors.
pub fn projector_decomposition() -> LocalDecomposition {
    let pol = polarization_states();
    let proj = |label: &str| {
        let (_, v) = pol.iter().find(|(l, _)| *l == label).expect("known label");
        ComplexMatrix::projector(v)
    };
    let pairs = [
        (0.5, "H", "V"),
        (0.5, "V", "H"),
        (-0.5, "D", "D"),
        (-0.5, "F", "F"),
        (0.5, "L", "L"),
        (0.5, "R", "R"),
    ];
    LocalDecomposition {
        terms: pairs
            .iter()
            .map(|&(c, a, b)| term(c, a, b, proj(a), proj(b)))
            .collect(),
    }
}

/// Identity followed by the `d^2 - 1` generalized Gell-Mann matrices
/// (symmetric, antisymmetric, diagonal), normalized to `Tr(G_j G_k) = 2 delta_jk`.
pub fn gellmann_basis(d: usize) -> Vec<(String, ComplexMatrix)> {
    let unit = |j: usize, k: usize, z: Complex64| {
        let mut e = vec![ZERO; d * d];
        e[j * d + k] = z;
        e
    };
    let from = |e: Vec<Complex64>| ComplexMatrix::from_row_major(d, d, &e).expect("finite");
    let mut out = vec![("I".to_string(), ComplexMatrix::identity(d))];
    for j in 0..d {
        for k in (j + 1)..d {
            let sym = from(unit(j, k, ONE)).add(&from(unit(k, j, ONE))).expect("same shape");
            out.push((format!("S{j}{k}"), sym));
        }
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let anti = from(unit(j, k, -I)).add(&from(unit(k, j, I))).expect("same shape");
            out.push((format!("A{j}{k}"), anti));
        }
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|j| match j.cmp(&l) {
                std::cmp::Ordering::Less => scale,
                std::cmp::Ordering::Equal => -(l as f64) * scale,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push((format!("D{l}"), ComplexMatrix::from_diagonal(&diag)));
    }
    out
}

/// Hilbert-Schmidt projection of `W` onto products of the Gell-Mann basis.
/// Terms with vanishing coefficients are dropped.
pub fn gellmann_decomposition(d: usize) -> Result<LocalDecomposition> {
    let w = witness_operator(d)?;
    let basis = gellmann_basis(d);
    let mut terms = Vec::new();
    for (la, ga) in &basis {
        for (lb, gb) in &basis {
            let op = linalg::kron(ga, gb);
            let norm = linalg::matmul(&op, &op)?.trace().re;
            let coefficient = linalg::matmul(&w, &op)?.trace().re / norm;
            if coefficient.abs() > 1e-15 {
                terms.push(term(coefficient, la, lb, ga.clone(), gb.clone()));
            }
        }
    }
    Ok(LocalDecomposition { terms })
}
