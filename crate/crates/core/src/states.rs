//! Bipartite `d x d` density matrices: validation, the standard state
//! families, and random states for property checks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::linalg::{self, complex_normal, ComplexMatrix, ComplexVector, ZERO};

/// Tolerance on `|Tr(rho) - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue a valid state may have.
pub const PSD_TOL: f64 = -1e-10;
/// Tolerance on `sum(alpha_i^2) - 1` for Schmidt amplitudes.
pub const NORM_TOL: f64 = 1e-10;

/// Which validation rule a candidate state broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationFailure {
    Shape,
    NonHermitian,
    Trace,
    NotPsd,
}

impl ValidationFailure {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Shape => "shape",
            Self::NonHermitian => "non-hermitian",
            Self::Trace => "trace",
            Self::NotPsd => "not-psd",
        }
    }

    /// Classifies a construction error, if it is a validation error.
    pub fn of(err: &Error) -> Option<Self> {
        match err {
            Error::Shape(_)
            | Error::NotSquare { .. }
            | Error::EntryCount { .. }
            | Error::NonFinite { .. }
            | Error::Dimension { .. } => Some(Self::Shape),
            Error::NotHermitian { .. } => Some(Self::NonHermitian),
            Error::Trace { .. } => Some(Self::Trace),
            Error::NotPsd { .. } => Some(Self::NotPsd),
            _ => None,
        }
    }
}

/// A validated state on `C^d (x) C^d`: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    d: usize,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `mat` as a state with local dimension `d`.
    pub fn new(d: usize, mat: ComplexMatrix) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension { d, min: 2 });
        }
        let n = d * d;
        if mat.rows() != n || mat.cols() != n {
            return Err(Error::Shape(format!(
                "expected {n}x{n} for d = {d}, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let deviation = mat.hermitian_deviation()?;
        if deviation > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Trace { trace });
        }
        let eig = linalg::hermitian_eig(&mat)?;
        let min_eigenvalue = eig.eigenvalues[0];
        if min_eigenvalue < PSD_TOL {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self { d, mat })
    }

    /// Validates a square matrix whose side is a perfect square `d^2`.
    pub fn from_matrix(mat: ComplexMatrix) -> Result<Self> {
        let n = mat.rows();
        let d = (n as f64).sqrt().round() as usize;
        if d * d != n {
            return Err(Error::Shape(format!(
                "side {n} is not the square of a local dimension"
            )));
        }
        Self::new(d, mat)
    }

    /// `I / d^2`.
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension { d, min: 2 });
        }
        let n = d * d;
        Ok(Self {
            d,
            mat: ComplexMatrix::identity(n).scale(1.0 / n as f64),
        })
    }

    /// `|psi><psi|` for a normalized vector of length `d^2`.
    pub fn pure(d: usize, psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized {
                norm_sq: norm * norm,
                defect: norm * norm - 1.0,
            });
        }
        Self::new(d, ComplexMatrix::projector(psi))
    }

    /// Local dimension of each subsystem.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// `<psi|rho|psi>`, real part.
    pub fn expectation_in(&self, psi: &ComplexVector) -> f64 {
        let v = psi.as_nalgebra();
        v.dotc(&(self.mat.as_nalgebra() * v)).re
    }

    /// `Tr(A rho)`.
    pub fn expectation_of(&self, op: &ComplexMatrix) -> Result<Complex64> {
        Ok(linalg::matmul(op, &self.mat)?.trace())
    }

    /// Applies `(V (x) I) rho (V^dagger (x) I)` for a local unitary `V` on the first factor.
    pub fn local_rotate(&self, v: &ComplexMatrix) -> Result<Self> {
        if v.rows() != self.d || v.cols() != self.d {
            return Err(Error::DimensionMismatch(v.rows(), self.d));
        }
        let big = linalg::kron(v, &ComplexMatrix::identity(self.d));
        let m = linalg::matmul(&linalg::matmul(&big, &self.mat)?, &linalg::dagger(&big))?;
        Self::new(self.d, m.hermitian_part())
    }
}

/// Parameters of one of the state families, validated on [`FamilyParams::build`].
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyParams {
    Isotropic { d: usize, beta: f64 },
    GeneralizedWerner { d: usize, v: f64, alphas: Vec<f64> },
    Mems { concurrence: f64 },
    Discord { a: f64 },
}

impl FamilyParams {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            Self::Isotropic { d, beta } => isotropic(*d, *beta),
            Self::GeneralizedWerner { d, v, alphas } => generalized_werner(*d, *v, alphas),
            Self::Mems { concurrence } => mems(*concurrence),
            Self::Discord { a } => discord_state(*a),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            Self::Isotropic { d, .. } | Self::GeneralizedWerner { d, .. } => *d,
            Self::Mems { .. } | Self::Discord { .. } => 2,
        }
    }
}

pub(crate) fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_finite() && value >= min && value <= max {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            min,
            max,
        })
    }
}

/// `|psi+> = (1/sqrt d) sum_i |ii>`.
pub fn max_entangled_state(d: usize) -> Result<ComplexVector> {
    if d < 2 {
        return Err(Error::Dimension { d, min: 2 });
    }
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    ComplexVector::new(&v)
}

/// Lower end of the admissible isotropic mixing weight, `-1/(d^2 - 1)`.
pub fn isotropic_beta_min(d: usize) -> f64 {
    -1.0 / ((d * d) as f64 - 1.0)
}

/// `beta |psi+><psi+| + (1 - beta) I / d^2`.
pub fn isotropic(d: usize, beta: f64) -> Result<DensityMatrix> {
    let psi = max_entangled_state(d)?;
    check_range("beta", beta, isotropic_beta_min(d), 1.0)?;
    let n = d * d;
    let mat = ComplexMatrix::projector(&psi)
        .scale(beta)
        .add(&ComplexMatrix::identity(n).scale((1.0 - beta) / n as f64))?;
    DensityMatrix::new(d, mat)
}

/// Sum of squares of real Schmidt amplitudes, checked against 1.
pub(crate) fn check_alphas(d: usize, alphas: &[f64]) -> Result<()> {
    if alphas.len() != d {
        return Err(Error::Invalid(format!(
            "expected {d} Schmidt amplitudes, got {}",
            alphas.len()
        )));
    }
    let norm_sq: f64 = alphas.iter().map(|a| a * a).sum();
    let defect = norm_sq - 1.0;
    if !norm_sq.is_finite() || defect.abs() > NORM_TOL {
        return Err(Error::Unnormalized { norm_sq, defect });
    }
    Ok(())
}

/// `(1 - v) I / d^2 + v |psi_d><psi_d|` with `|psi_d> = sum_i alpha_i |ii>`, real `alpha_i`.
pub fn generalized_werner(d: usize, v: f64, alphas: &[f64]) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Dimension { d, min: 2 });
    }
    check_range("v", v, 0.0, 1.0)?;
    check_alphas(d, alphas)?;
    let mut amp = vec![ZERO; d * d];
    for (i, &a) in alphas.iter().enumerate() {
        amp[i * d + i] = Complex64::new(a, 0.0);
    }
    let psi = ComplexVector::new(&amp)?;
    let n = d * d;
    let mat = ComplexMatrix::projector(&psi)
        .scale(v)
        .add(&ComplexMatrix::identity(n).scale((1.0 - v) / n as f64))?;
    DensityMatrix::new(d, mat)
}

/// Diagonal weight `h(C)` of the two-qubit MEMS family.
pub fn mems_h(concurrence: f64) -> f64 {
    if concurrence >= 2.0 / 3.0 {
        concurrence / 2.0
    } else {
        1.0 / 3.0
    }
}

/// Two-qubit maximally entangled mixed state with concurrence `C`:
///
/// ```text
/// [ h    0      0  C/2 ]
/// [ 0  1-2h     0   0  ]
/// [ 0    0      0   0  ]
/// [ C/2  0      0   h  ]
/// ```
pub fn mems(concurrence: f64) -> Result<DensityMatrix> {
    check_range("concurrence", concurrence, 0.0, 1.0)?;
    let h = mems_h(concurrence);
    let c = concurrence / 2.0;
    #[rustfmt::skip]
    let entries = [
        h,   0.0,             0.0, c,
        0.0, 1.0 - 2.0 * h,   0.0, 0.0,
        0.0, 0.0,             0.0, 0.0,
        c,   0.0,             0.0, h,
    ];
    DensityMatrix::new(2, ComplexMatrix::from_real(4, 4, &entries)?)
}

/// `a |phi><phi| + (1 - a) |11><11|` with `|phi> = (|01> + |10>)/sqrt 2`.
pub fn discord_state(a: f64) -> Result<DensityMatrix> {
    check_range("a", a, 0.0, 1.0)?;
    let half = a / 2.0;
    #[rustfmt::skip]
    let entries = [
        0.0, 0.0,  0.0,  0.0,
        0.0, half, half, 0.0,
        0.0, half, half, 0.0,
        0.0, 0.0,  0.0,  1.0 - a,
    ];
    DensityMatrix::new(2, ComplexMatrix::from_real(4, 4, &entries)?)
}

/// `G G^dagger / Tr(G G^dagger)` for a `d^2 x rank` Ginibre matrix `G`.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Dimension { d, min: 2 });
    }
    let n = d * d;
    if rank == 0 || rank > n {
        return Err(Error::OutOfRange {
            name: "rank",
            value: rank as f64,
            min: 1.0,
            max: n as f64,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = linalg::ginibre(n, rank, &mut rng).into_nalgebra();
    let gram = &g * g.adjoint();
    let tr = gram.trace().re;
    let mat = ComplexMatrix::wrap(gram / Complex64::new(tr, 0.0));
    DensityMatrix::new(d, mat.hermitian_part())
}

fn random_pure_local(d: usize, rng: &mut ChaCha8Rng) -> ComplexVector {
    // A normalized complex Gaussian vector is uniform on the unit sphere,
    // i.e. the first column of a Haar unitary.
    let raw = nalgebra::DVector::from_fn(d, |_, _| complex_normal(rng));
    let norm = raw.norm();
    ComplexVector::wrap(raw / Complex64::new(norm, 0.0))
}

/// Mixture `sum_k p_k |x_k><x_k| (x) |y_k><y_k|` of random product states
/// with flat-Dirichlet weights.
pub fn random_separable(d: usize, terms: usize, seed: u64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Dimension { d, min: 2 });
    }
    if terms == 0 {
        return Err(Error::Invalid("random_separable needs at least one term".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..terms).map(|_| Exp1.sample(&mut rng)).collect();
    let total: f64 = raw.iter().sum();
    let n = d * d;
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for w in raw {
        let x = random_pure_local(d, &mut rng);
        let y = random_pure_local(d, &mut rng);
        let xy = x.kron(&y);
        let col = xy.as_nalgebra();
        acc += (col * col.adjoint()) * Complex64::new(w / total, 0.0);
    }
    DensityMatrix::new(d, ComplexMatrix::wrap(acc).hermitian_part())
}

/// Convex combination `lambda rho1 + (1 - lambda) rho2`.
pub fn mix(rho1: &DensityMatrix, rho2: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
    if rho1.d != rho2.d {
        return Err(Error::DimensionMismatch(rho1.d, rho2.d));
    }
    check_range("lambda", lambda, 0.0, 1.0)?;
    let mat = rho1.mat.scale(lambda).add(&rho2.mat.scale(1.0 - lambda))?;
    DensityMatrix::new(rho1.d, mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, hermitian_eig, matmul};

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn assert_mat_close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) {
        let diff = a.max_abs_diff(b).unwrap();
        assert!(diff <= tol, "max |a - b| = {diff:e}\n{a:?}\n{b:?}");
    }

    #[test]
    fn max_entangled_d2() {
        let psi = max_entangled_state(2).unwrap();
        let want = [S, 0.0, 0.0, S];
        for (z, w) in psi.entries().iter().zip(want) {
            assert!((z.re - w).abs() < 1e-15 && z.im == 0.0);
        }
        assert!((psi.inner(&psi).norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn max_entangled_normalized() {
        for d in 2..=5 {
            assert!((max_entangled_state(d).unwrap().norm() - 1.0).abs() < 1e-14);
        }
        assert!(matches!(max_entangled_state(1), Err(Error::Dimension { .. })));
    }

    #[test]
    fn isotropic_endpoints() {
        for d in 2..=4 {
            let n = d * d;
            let mixed = isotropic(d, 0.0).unwrap();
            assert_mat_close(mixed.matrix(), &ComplexMatrix::identity(n).scale(1.0 / n as f64), 1e-15);
            let pure = isotropic(d, 1.0).unwrap();
            let proj = ComplexMatrix::projector(&max_entangled_state(d).unwrap());
            assert_mat_close(pure.matrix(), &proj, 1e-15);
        }
    }

    #[test]
    fn isotropic_overlap() {
        for d in 2..=4 {
            let psi = max_entangled_state(d).unwrap();
            for beta in [isotropic_beta_min(d), -0.01, 0.2, 0.5, 0.9] {
                let rho = isotropic(d, beta).unwrap();
                let want = beta + (1.0 - beta) / (d * d) as f64;
                assert!((rho.expectation_in(&psi) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn isotropic_range_errors() {
        assert!(matches!(isotropic(2, 1.01), Err(Error::OutOfRange { name: "beta", .. })));
        assert!(matches!(isotropic(2, -0.34), Err(Error::OutOfRange { .. })));
        assert!(isotropic(2, -1.0 / 3.0).is_ok());
        let msg = isotropic(3, -0.2).unwrap_err().to_string();
        assert!(msg.contains("-0.125"), "{msg}");
    }

    #[test]
    fn werner_limits() {
        let mixed = generalized_werner(3, 0.0, &[1.0, 0.0, 0.0]).unwrap();
        assert_mat_close(mixed.matrix(), &ComplexMatrix::identity(9).scale(1.0 / 9.0), 1e-15);

        let bell = generalized_werner(2, 1.0, &[S, S]).unwrap();
        let proj = ComplexMatrix::projector(&max_entangled_state(2).unwrap());
        assert_mat_close(bell.matrix(), &proj, 1e-15);

        let product = generalized_werner(2, 1.0, &[1.0, 0.0]).unwrap();
        assert_mat_close(product.matrix(), &ComplexMatrix::from_diagonal(&[1.0, 0.0, 0.0, 0.0]), 1e-15);
    }

    #[test]
    fn werner_rejects_unnormalized() {
        match generalized_werner(2, 0.5, &[0.5, 0.5]) {
            Err(Error::Unnormalized { defect, .. }) => assert!((defect + 0.5).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
        assert!(generalized_werner(2, 1.5, &[1.0, 0.0]).is_err());
        assert!(generalized_werner(2, 0.5, &[1.0]).is_err());
    }

    #[test]
    fn mems_endpoints() {
        let m0 = mems(0.0).unwrap();
        let third = 1.0 / 3.0;
        assert_mat_close(m0.matrix(), &ComplexMatrix::from_diagonal(&[third, third, 0.0, third]), 1e-15);

        let m1 = mems(1.0).unwrap();
        let proj = ComplexMatrix::projector(&max_entangled_state(2).unwrap());
        assert_mat_close(m1.matrix(), &proj, 1e-15);
        assert!(mems(1.1).is_err());
        assert!(mems(-0.1).is_err());
    }

    #[test]
    fn mems_continuous_at_branch_point() {
        let c = 2.0 / 3.0;
        assert_eq!(mems_h(c), 1.0 / 3.0);
        let below = mems(c - 1e-13).unwrap();
        let at = mems(c).unwrap();
        let above = mems(c + 1e-13).unwrap();
        assert_mat_close(below.matrix(), at.matrix(), 1e-12);
        assert_mat_close(above.matrix(), at.matrix(), 1e-12);
    }

    #[test]
    fn discord_limits() {
        let zero = discord_state(0.0).unwrap();
        assert_mat_close(zero.matrix(), &ComplexMatrix::from_diagonal(&[0.0, 0.0, 0.0, 1.0]), 0.0);
        let one = discord_state(1.0).unwrap();
        let phi = ComplexVector::new(&[ZERO, S.into(), S.into(), ZERO]).unwrap();
        assert_mat_close(one.matrix(), &ComplexMatrix::projector(&phi), 1e-15);
        for a in [0.0, 0.3, 0.77, 1.0] {
            assert_eq!(discord_state(a).unwrap().matrix().get(0, 0), ZERO);
        }
    }

    #[test]
    fn random_density_properties() {
        for d in 2..=3 {
            for seed in 0..10 {
                let pure = random_density(d, 1, seed).unwrap();
                let sq = matmul(pure.matrix(), pure.matrix()).unwrap();
                assert_mat_close(&sq, pure.matrix(), 1e-10);

                let full = random_density(d, d * d, seed).unwrap();
                assert!((full.matrix().trace().re - 1.0).abs() < 1e-12);
                let eig = hermitian_eig(full.matrix()).unwrap();
                assert!(eig.eigenvalues[0] >= -1e-12);
            }
        }
        assert!(random_density(2, 0, 0).is_err());
        assert!(random_density(2, 5, 0).is_err());
        assert_eq!(random_density(2, 3, 9).unwrap(), random_density(2, 3, 9).unwrap());
    }

    #[test]
    fn random_separable_traces() {
        for seed in 0..20 {
            let rho = random_separable(3, 5, seed).unwrap();
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
        // One term gives a pure product state.
        let rho = random_separable(2, 1, 4).unwrap();
        let sq = matmul(rho.matrix(), rho.matrix()).unwrap();
        assert_mat_close(&sq, rho.matrix(), 1e-12);
    }

    #[test]
    fn mix_endpoints_and_errors() {
        let a = random_density(2, 2, 1).unwrap();
        let b = random_density(2, 4, 2).unwrap();
        assert_mat_close(mix(&a, &b, 0.0).unwrap().matrix(), b.matrix(), 1e-15);
        assert_mat_close(mix(&a, &b, 1.0).unwrap().matrix(), a.matrix(), 1e-15);
        let c = random_density(3, 2, 1).unwrap();
        assert!(matches!(mix(&a, &c, 0.5), Err(Error::DimensionMismatch(2, 3))));
        assert!(mix(&a, &b, 1.5).is_err());
    }

    #[test]
    fn validation_failures_are_named() {
        let bad_trace = ComplexMatrix::identity(4).scale(0.9 / 4.0);
        let err = DensityMatrix::new(2, bad_trace).unwrap_err();
        assert_eq!(ValidationFailure::of(&err), Some(ValidationFailure::Trace));

        let neg = ComplexMatrix::from_diagonal(&[1.5, -0.5, 0.0, 0.0]);
        let err = DensityMatrix::new(2, neg).unwrap_err();
        assert_eq!(ValidationFailure::of(&err), Some(ValidationFailure::NotPsd));

        let mut e = vec![ZERO; 16];
        e[0] = Complex64::new(0.5, 0.0);
        e[5] = Complex64::new(0.5, 0.0);
        e[1] = Complex64::new(0.1, 0.0);
        let err = DensityMatrix::new(2, ComplexMatrix::from_row_major(4, 4, &e).unwrap()).unwrap_err();
        assert_eq!(ValidationFailure::of(&err), Some(ValidationFailure::NonHermitian));

        let err = DensityMatrix::from_matrix(ComplexMatrix::identity(3).scale(1.0 / 3.0)).unwrap_err();
        assert_eq!(ValidationFailure::of(&err), Some(ValidationFailure::Shape));
    }

    #[test]
    fn local_rotation_preserves_norm() {
        let rho = random_density(2, 3, 5).unwrap();
        let v = linalg::random_haar_unitary(2, 11);
        let rotated = rho.local_rotate(&v).unwrap();
        assert!((frobenius_norm(rotated.matrix()) - frobenius_norm(rho.matrix())).abs() < 1e-12);
    }

    #[test]
    fn family_params_dispatch() {
        let p = FamilyParams::Isotropic { d: 3, beta: 0.4 };
        assert_eq!(p.build().unwrap(), isotropic(3, 0.4).unwrap());
        assert_eq!(FamilyParams::Mems { concurrence: 0.5 }.d(), 2);
    }
}
