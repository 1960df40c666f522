//! Dense complex linear algebra on small matrices.
//!
//! [`ComplexMatrix`] wraps an `nalgebra` dense matrix and guarantees every
//! entry is finite. Everything here is a pure function of its inputs.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Absolute, entrywise tolerance on `max |A - A^dagger|`.
pub const HERMITIAN_TOL: f64 = 1e-10;

const EIG_EPS: f64 = 1e-15;
const EIG_MAX_SWEEPS: usize = 10_000;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!("{rows}x{cols} has no entries")));
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                got: entries.len(),
            });
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a matrix from nested rows, which must all have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
            return Err(Error::Shape(format!(
                "row {bad} has {} entries, expected {ncols}",
                rows[bad].len()
            )));
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), ncols, &flat)
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(rows, cols, &c)
    }

    /// Wraps an `nalgebra` matrix, rejecting NaN and infinite entries.
    pub fn from_nalgebra(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::Shape(format!("{}x{} has no entries", m.nrows(), m.ncols())));
        }
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self(m))
    }

    // Internal constructor for results of arithmetic on already finite data.
    pub(crate) fn wrap(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self(m)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self(DMatrix::from_diagonal(&v))
    }

    /// Outer product `|v><v|`.
    pub fn projector(v: &ComplexVector) -> Self {
        let col = v.as_nalgebra();
        Self(col * col.adjoint())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn to_row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::wrap(&self.0 * Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape("add", other)?;
        Ok(Self::wrap(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape("sub", other)?;
        Ok(Self::wrap(&self.0 - &other.0))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape("max_abs_diff", other)?;
        Ok(self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |A - A^dagger|` over all entries.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let n = self.rows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        Ok(worst)
    }

    /// Hermitian part `(A + A^dagger)/2`.
    pub(crate) fn hermitian_part(&self) -> Self {
        Self::wrap((&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0))
    }

    fn same_shape(&self, op: &'static str, other: &Self) -> Result<()> {
        if self.0.shape() != other.0.shape() {
            return Err(Error::ShapeMismatch {
                op,
                lhs: self.0.shape(),
                rhs: other.0.shape(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.0[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense complex column vector with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(DVector<Complex64>);

impl ComplexVector {
    pub fn new(entries: &[Complex64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Shape("empty vector".into()));
        }
        if let Some(i) = entries
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { row: i, col: 0 });
        }
        Ok(Self(DVector::from_column_slice(entries)))
    }

    pub(crate) fn wrap(v: DVector<Complex64>) -> Self {
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.dotc(&other.0)
    }

    pub fn as_nalgebra(&self) -> &DVector<Complex64> {
        &self.0
    }

    /// Tensor product `|self> (x) |other>`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }
}

/// Matrix product `a * b`.
pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch {
            op: "matmul",
            lhs: a.0.shape(),
            rhs: b.0.shape(),
        });
    }
    Ok(ComplexMatrix::wrap(&a.0 * &b.0))
}

/// Kronecker product; block `(i, j)` of the result is `a[i, j] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::wrap(a.0.kronecker(&b.0))
}

/// Conjugate transpose.
pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::wrap(a.0.adjoint())
}

/// `sqrt(Tr(A^dagger A))`.
pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.0.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Spectrum of a Hermitian matrix: ascending eigenvalues, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V diag(f(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let v = &self.eigenvectors.0;
        let mut scaled = v.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= s);
        }
        ComplexMatrix::wrap(scaled * v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| Complex64::new(l, 0.0))
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Input must be Hermitian within [`HERMITIAN_TOL`]. The Hermitian part is
/// decomposed so the eigenvalues are exactly real.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = a.hermitian_deviation()?;
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let h = a.hermitian_part();
    let n = h.rows();
    let eig = h
        .0
        .try_symmetric_eigen(EIG_EPS, EIG_MAX_SWEEPS)
        .ok_or(Error::NoConvergence {
            iterations: EIG_MAX_SWEEPS,
        })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: ComplexMatrix::wrap(vectors),
    })
}

/// `exp(iH)` for Hermitian `H`, through its eigendecomposition.
pub fn expm_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h)?;
    Ok(eig.map_spectrum(|l| Complex64::from_polar(1.0, l)))
}

/// `||U^dagger U - I||_F`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = u.0.adjoint() * &u.0 - DMatrix::<Complex64>::identity(u.rows(), u.cols());
    g.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::wrap(DMatrix::from_fn(rows, cols, |_, _| complex_normal(rng)))
}

/// Haar-distributed `d x d` unitary drawn from `rng`.
///
/// QR of a Ginibre matrix, with each column of Q multiplied by the phase of
/// the matching diagonal entry of R.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    assert!(d >= 1, "unitary dimension must be positive");
    loop {
        let g = ginibre(d, d, rng).0;
        let qr = g.qr();
        let r = qr.r();
        let mut q = qr.q();
        let mut degenerate = false;
        for k in 0..d {
            let rkk = r[(k, k)];
            let m = rkk.norm();
            if m < 1e-300 {
                degenerate = true;
                break;
            }
            let phase = rkk / m;
            q.column_mut(k).iter_mut().for_each(|z| *z *= phase);
        }
        // A singular Ginibre draw has probability zero; redraw if it happens.
        if !degenerate {
            return ComplexMatrix::wrap(q);
        }
    }
}

/// Deterministic Haar-random unitary for a given seed.
pub fn random_haar_unitary(d: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary(d, &mut rng)
}
