//! Fully entangled fraction
//!
//! `F(rho) = max_U <psi+| (U^dagger (x) I) rho (U (x) I) |psi+>`
//!
//! Three routes are provided:
//!
//! * [`fef_exact_2x2`] for two qubits. In the magic basis every maximally
//!   entangled two-qubit state is a real unit vector up to a global phase, so
//!   the maximum is the top eigenvalue of `Re(M)` where `M` is `rho` written in
//!   that basis.
//! * [`fef_optimize`] for any `d`: multi-start gradient ascent over
//!   `U <- U exp(iH)`, finite-difference gradient in the `d^2` real
//!   coordinates of `H`. The result is an attained overlap, hence a lower
//!   bound on `F`.
//! * [`fef_sample`]: best overlap among Haar-random unitaries, a cheap lower
//!   bound used to cross-check the optimizer.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, I, ZERO};
use crate::states::{max_entangled_state, DensityMatrix};

/// Unitarity tolerance accepted by [`fef_overlap`].
pub const UNITARY_TOL: f64 = 1e-8;
/// Largest imaginary part of an overlap that is discarded silently.
pub const IMAG_TOL: f64 = 1e-10;
/// Central-difference step for the optimizer gradient.
pub const FD_STEP: f64 = 1e-5;

const MAX_BACKTRACKS: usize = 40;
const MAX_STEP: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FefMethod {
    Exact2x2,
    UnitaryAscent,
    Sampling,
}

impl FefMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exact2x2 => "exact-2x2",
            Self::UnitaryAscent => "unitary-ascent",
            Self::Sampling => "sampling",
        }
    }
}

/// An FEF value with the unitary that attains it.
#[derive(Debug, Clone)]
pub struct FefEstimate {
    pub value: f64,
    pub method: FefMethod,
    pub restarts_used: usize,
    /// Total ascent iterations (optimizer) or samples drawn (sampler).
    pub iterations: usize,
    pub converged: bool,
    pub best_unitary: ComplexMatrix,
}

impl FefEstimate {
    /// Whether the value exceeds the classical teleportation threshold `1/d`.
    pub fn is_useful(&self, d: usize) -> bool {
        self.value > 1.0 / d as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Initial ascent step; adapted during the line search.
    pub gradient_step: f64,
    pub convergence_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iterations: 500,
            gradient_step: 0.1,
            convergence_tol: 1e-9,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(Error::Invalid(
                "restarts and max_iterations must be positive".into(),
            ));
        }
        if !(self.gradient_step > 0.0 && self.gradient_step.is_finite()) {
            return Err(Error::Invalid("gradient_step must be positive".into()));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return Err(Error::Invalid("convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

// <psi+|(U^dagger (x) I) rho (U (x) I)|psi+> with (U (x) I)|psi+> = vec_row(U)/sqrt(d).
fn overlap_raw(rho: &DMatrix<Complex64>, u: &DMatrix<Complex64>) -> Complex64 {
    let d = u.nrows();
    let n = d * d;
    let mut acc = ZERO;
    for r in 0..n {
        let ur = u[(r / d, r % d)];
        if ur == ZERO {
            continue;
        }
        let mut row = ZERO;
        for c in 0..n {
            row += rho[(r, c)] * u[(c / d, c % d)];
        }
        acc += ur.conj() * row;
    }
    acc / d as f64
}

/// Overlap of `(U (x) I)|psi+>` with `rho`.
pub fn fef_overlap(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<f64> {
    let d = rho.d();
    if u.rows() != d || u.cols() != d {
        return Err(Error::ShapeMismatch {
            op: "fef_overlap",
            lhs: (d, d),
            rhs: (u.rows(), u.cols()),
        });
    }
    let deviation = linalg::unitarity_defect(u);
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    let z = overlap_raw(rho.matrix().as_nalgebra(), u.as_nalgebra());
    if z.im.abs() > IMAG_TOL {
        return Err(Error::Invalid(format!(
            "overlap has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// Columns are the magic basis
/// `(|00>+|11>)/sqrt2, i(|00>-|11>)/sqrt2, i(|01>+|10>)/sqrt2, (|01>-|10>)/sqrt2`.
pub fn magic_basis() -> ComplexMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let si = I * s;
    #[rustfmt::skip]
    let entries = [
        s,    si,   ZERO, ZERO,
        ZERO, ZERO, si,   s,
        ZERO, ZERO, si,   -s,
        s,    -si,  ZERO, ZERO,
    ];
    ComplexMatrix::from_row_major(4, 4, &entries).expect("finite constant")
}

/// Exact FEF of a two-qubit state.
pub fn fef_exact_2x2(rho: &DensityMatrix) -> Result<FefEstimate> {
    if rho.d() != 2 {
        return Err(Error::Invalid(format!(
            "exact method needs d = 2, got {}",
            rho.d()
        )));
    }
    let b = magic_basis();
    let bm = b.as_nalgebra();
    let m = bm.adjoint() * rho.matrix().as_nalgebra() * bm;
    let re = DMatrix::<f64>::from_fn(4, 4, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    let eig = re.symmetric_eigen();
    let (k, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("4 eigenvalues");
    let x = eig.eigenvectors.column(k);
    let phi = bm * x.map(|t| Complex64::new(t, 0.0));
    let root2 = std::f64::consts::SQRT_2;
    let u = DMatrix::from_fn(2, 2, |a, i| phi[a * 2 + i] * root2);
    Ok(FefEstimate {
        value,
        method: FefMethod::Exact2x2,
        restarts_used: 0,
        iterations: 0,
        converged: true,
        best_unitary: ComplexMatrix::wrap(u),
    })
}

/// Hermitian matrix from `d^2` real coordinates: diagonal first, then the
/// real and imaginary parts of each upper off-diagonal entry.
fn hermitian_from_coords(d: usize, coords: &[f64]) -> DMatrix<Complex64> {
    let mut h = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        h[(i, i)] = Complex64::new(coords[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = Complex64::new(coords[k], coords[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    h
}

fn expm_i(h: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let s = Complex64::from_polar(1.0, lam);
        scaled.column_mut(k).iter_mut().for_each(|z| *z *= s);
    }
    scaled * v.adjoint()
}

struct Ascent {
    value: f64,
    unitary: DMatrix<Complex64>,
    iterations: usize,
    converged: bool,
}

fn ascend(rho: &DMatrix<Complex64>, start: DMatrix<Complex64>, cfg: &OptimizerConfig) -> Ascent {
    let d = start.nrows();
    let p = d * d;
    let objective = |u: &DMatrix<Complex64>, coords: &[f64]| -> f64 {
        let step = expm_i(hermitian_from_coords(d, coords));
        overlap_raw(rho, &(u * step)).re
    };

    let mut u = start;
    let mut value = overlap_raw(rho, &u).re;
    let mut step = cfg.gradient_step;
    let mut coords = vec![0.0; p];
    let mut grad = vec![0.0; p];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        for k in 0..p {
            coords.iter_mut().for_each(|c| *c = 0.0);
            coords[k] = FD_STEP;
            let plus = objective(&u, &coords);
            coords[k] = -FD_STEP;
            let minus = objective(&u, &coords);
            grad[k] = (plus - minus) / (2.0 * FD_STEP);
        }
        let gnorm_sq: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm_sq == 0.0 {
            converged = true;
            break;
        }

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            coords
                .iter_mut()
                .zip(&grad)
                .for_each(|(c, g)| *c = step * g);
            let candidate = &u * expm_i(hermitian_from_coords(d, &coords));
            let cand_value = overlap_raw(rho, &candidate).re;
            if cand_value > value {
                accepted = Some((candidate, cand_value));
                break;
            }
            step *= 0.5;
        }

        match accepted {
            Some((candidate, cand_value)) => {
                let gain = cand_value - value;
                u = candidate;
                value = cand_value;
                step = (step * 2.0).min(MAX_STEP);
                if gain < cfg.convergence_tol {
                    converged = true;
                    break;
                }
            }
            None => {
                // No ascent direction left at finite-difference resolution.
                converged = true;
                break;
            }
        }
    }

    Ascent {
        value,
        unitary: u,
        iterations,
        converged,
    }
}

fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Multi-start ascent of the FEF objective. Restart 0 starts at the identity,
/// the others at Haar-random unitaries seeded by `(seed, restart)`.
pub fn fef_optimize(rho: &DensityMatrix, config: &OptimizerConfig) -> Result<FefEstimate> {
    config.validate()?;
    let d = rho.d();
    let r = rho.matrix().as_nalgebra();
    let runs: Vec<Ascent> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                DMatrix::identity(d, d)
            } else {
                linalg::haar_unitary(d, &mut restart_rng(config.seed, k)).into_nalgebra()
            };
            ascend(r, start, config)
        })
        .collect();

    let iterations = runs.iter().map(|a| a.iterations).sum();
    // First strictly better run wins, so the result does not depend on scheduling.
    let best = runs
        .into_iter()
        .reduce(|best, a| if a.value > best.value { a } else { best })
        .expect("at least one restart");
    Ok(FefEstimate {
        value: best.value,
        method: FefMethod::UnitaryAscent,
        restarts_used: config.restarts,
        iterations,
        converged: best.converged,
        best_unitary: ComplexMatrix::wrap(best.unitary),
    })
}

/// Best overlap over `n_samples` Haar-random unitaries.
pub fn fef_sample(rho: &DensityMatrix, n_samples: usize, seed: u64) -> Result<FefEstimate> {
    if n_samples == 0 {
        return Err(Error::Invalid("n_samples must be at least 1".into()));
    }
    let d = rho.d();
    let r = rho.matrix().as_nalgebra();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DMatrix<Complex64>)> = None;
    for _ in 0..n_samples {
        let u = linalg::haar_unitary(d, &mut rng).into_nalgebra();
        let v = overlap_raw(r, &u).re;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, u));
        }
    }
    let (value, u) = best.expect("n_samples >= 1");
    Ok(FefEstimate {
        value,
        method: FefMethod::Sampling,
        restarts_used: 0,
        iterations: n_samples,
        converged: true,
        best_unitary: ComplexMatrix::wrap(u),
    })
}

/// Exact method at `d = 2`, optimizer otherwise.
pub fn fef(rho: &DensityMatrix, config: &OptimizerConfig) -> Result<FefEstimate> {
    if rho.d() == 2 {
        fef_exact_2x2(rho)
    } else {
        fef_optimize(rho, config)
    }
}

/// Lipschitz constant `C^2 K^2` of `F` under the Frobenius norm, where
/// `C = ||<psi+|||` and `K = ||U (x) I||_F` for any unitary `U`.
pub fn continuity_bound(d: usize) -> Result<f64> {
    // C = 1 for the normalized state; squaring its computed norm only adds ulps.
    max_entangled_state(d)?;
    // ||U (x) I||_F^2 = Tr(I_{d^2}) for unitary U.
    let k_sq = (d * d) as f64;
    Ok(k_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{generalized_werner, isotropic, random_density};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn bell(d: usize) -> DensityMatrix {
        isotropic(d, 1.0).unwrap()
    }

    #[test]
    fn overlap_basics() {
        for d in 2..=4 {
            let id = ComplexMatrix::identity(d);
            assert!((fef_overlap(&bell(d), &id).unwrap() - 1.0).abs() < 1e-14);
            let mixed = DensityMatrix::maximally_mixed(d).unwrap();
            let u = linalg::random_haar_unitary(d, d as u64);
            let want = 1.0 / (d * d) as f64;
            assert!((fef_overlap(&mixed, &u).unwrap() - want).abs() < 1e-14);
            for beta in [0.0, 0.3, 0.8] {
                let rho = isotropic(d, beta).unwrap();
                let want = beta + (1.0 - beta) / (d * d) as f64;
                assert!((fef_overlap(&rho, &id).unwrap() - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn overlap_rejects_non_unitary() {
        let rho = bell(2);
        let m = ComplexMatrix::identity(2).scale(1.01);
        assert!(matches!(fef_overlap(&rho, &m), Err(Error::NotUnitary { .. })));
        assert!(fef_overlap(&rho, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn magic_basis_is_unitary() {
        assert!(linalg::unitarity_defect(&magic_basis()) < 1e-15);
    }

    #[test]
    fn exact_endpoints() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((fef_exact_2x2(&mixed).unwrap().value - 0.25).abs() < 1e-15);
        assert!((fef_exact_2x2(&bell(2)).unwrap().value - 1.0).abs() < 1e-14);
        assert!(fef_exact_2x2(&bell(3)).is_err());
    }

    #[test]
    fn exact_werner_values() {
        for v in [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0] {
            let rho = generalized_werner(2, v, &[S, S]).unwrap();
            let est = fef_exact_2x2(&rho).unwrap();
            assert!((est.value - (1.0 + 3.0 * v) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_unitary_reproduces_value() {
        for seed in 0..30 {
            let rho = random_density(2, 1 + (seed as usize % 4), seed).unwrap();
            let est = fef_exact_2x2(&rho).unwrap();
            assert!(linalg::unitarity_defect(&est.best_unitary) < 1e-12);
            let back = fef_overlap(&rho, &est.best_unitary).unwrap();
            assert!((back - est.value).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let rho = random_density(3, 2, 4).unwrap();
        let a = fef_sample(&rho, 1, 99).unwrap();
        let b = fef_sample(&rho, 1, 99).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_unitary, b.best_unitary);
        assert!(fef_sample(&rho, 0, 0).is_err());
    }

    #[test]
    fn sampler_on_maximally_mixed() {
        for d in 2..=3 {
            let rho = DensityMatrix::maximally_mixed(d).unwrap();
            let est = fef_sample(&rho, 50, 1).unwrap();
            assert!((est.value - 1.0 / (d * d) as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn optimizer_on_bell_state() {
        for d in 2..=4 {
            let est = fef_optimize(&bell(d), &OptimizerConfig::default()).unwrap();
            assert!((est.value - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn optimizer_isotropic_d3() {
        let rho = isotropic(3, 0.7).unwrap();
        let est = fef_optimize(&rho, &OptimizerConfig::default()).unwrap();
        assert!((est.value - (0.7 + 0.3 / 9.0)).abs() < 1e-6);
    }

    #[test]
    fn optimizer_is_deterministic() {
        let rho = random_density(3, 3, 8).unwrap();
        let cfg = OptimizerConfig {
            restarts: 4,
            seed: 5,
            ..Default::default()
        };
        let a = fef_optimize(&rho, &cfg).unwrap();
        let b = fef_optimize(&rho, &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.best_unitary, b.best_unitary);
        let id = ComplexMatrix::identity(3);
        assert!(a.value >= fef_overlap(&rho, &id).unwrap() - 1e-12);
        let back = fef_overlap(&rho, &a.best_unitary).unwrap();
        assert!((back - a.value).abs() < 1e-9);
    }

    #[test]
    fn optimizer_rejects_bad_config() {
        let cfg = OptimizerConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(fef_optimize(&bell(2), &cfg).is_err());
    }

    #[test]
    fn continuity_constants() {
        assert_eq!(continuity_bound(2).unwrap(), 4.0);
        assert_eq!(continuity_bound(3).unwrap(), 9.0);
        assert!(continuity_bound(1).is_err());
    }

    #[test]
    fn coords_span_hermitian() {
        let coords: Vec<f64> = (0..9).map(|k| k as f64 * 0.1).collect();
        let h = ComplexMatrix::wrap(hermitian_from_coords(3, &coords));
        assert_eq!(h.hermitian_deviation().unwrap(), 0.0);
    }
}
