//! Dense complex matrix algebra for the quantum objects.
//!
//! [`ComplexMatrix`] is a thin validated wrapper over a `nalgebra` dense
//! matrix. Everything a two-point-measurement experiment needs lives here:
//! products and adjoints, traces and norms, a deterministic Hermitian
//! eigensolver, scalar functions of Hermitian operators, Kronecker products
//! and Haar-random unitaries.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Default relative tolerance for Hermiticity checks.
pub const DEFAULT_HERMITICITY_TOL: f64 = 1e-10;

/// Default cap on the dimension of a Kronecker product.
pub const DEFAULT_KRON_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("invalid shape {rows}x{cols}: both dimensions must be at least 1")]
    InvalidShape { rows: usize, cols: usize },

    #[error("ragged input: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("function produced a non-finite value at eigenvalue {eigenvalue}")]
    NonFiniteResult { eigenvalue: f64 },

    #[error("Kronecker product dimension {dim} exceeds cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense complex matrix with finite entries and at least one row and column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            write!(f, "  ")?;
            for c in 0..self.cols() {
                let z = self.inner[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Wraps a nalgebra matrix, checking shape and finiteness.
    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = inner.shape();
        if rows == 0 || cols == 0 {
            return Err(LinalgError::InvalidShape { rows, cols });
        }
        for c in 0..cols {
            for r in 0..rows {
                let z = inner[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(LinalgError::NonFiniteEntry { row: r, col: c });
                }
            }
        }
        Ok(Self { inner })
    }

    /// Builds from row-major closure values.
    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::from_nalgebra(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds from separate real and imaginary row-major arrays.
    pub fn from_parts(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let rows = re.len();
        let cols = re.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(LinalgError::InvalidShape { rows, cols });
        }
        if im.len() != rows {
            return Err(LinalgError::DimensionMismatch {
                left: (rows, cols),
                right: (im.len(), im.first().map_or(0, Vec::len)),
            });
        }
        for (row, (r, i)) in re.iter().zip(im).enumerate() {
            if r.len() != cols {
                return Err(LinalgError::Ragged { row, expected: cols, found: r.len() });
            }
            if i.len() != cols {
                return Err(LinalgError::Ragged { row, expected: cols, found: i.len() });
            }
        }
        Self::from_fn(rows, cols, |r, c| Complex64::new(re[r][c], im[r][c]))
    }

    /// Real matrix from row-major rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let zeros: Vec<Vec<f64>> = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        Self::from_parts(rows, &zeros)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_nalgebra(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_nalgebra(DMatrix::identity(dim, dim))
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Outer product |v⟩⟨w|.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Result<Self> {
        Self::from_fn(v.len(), w.len(), |r, c| v[r] * w[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        self.inner.column(col).iter().copied().collect()
    }

    /// Row-major real and imaginary parts.
    pub fn to_parts(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let re = (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.inner[(r, c)].re).collect())
            .collect();
        let im = (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| self.inner[(r, c)].im).collect())
            .collect();
        (re, im)
    }

    pub fn adjoint(&self) -> Self {
        Self { inner: self.inner.adjoint() }
    }

    pub fn transpose(&self) -> Self {
        Self { inner: self.inner.transpose() }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { inner: &self.inner * factor }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.rows().min(self.cols());
        (0..n).map(|i| self.inner[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Frobenius distance ‖self − other‖_F. Panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance: shape mismatch");
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// ‖A − A†‖_F.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.distance(&self.adjoint())
    }

    /// ‖A†A − I‖_F.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.adjoint().matmul(self);
        gram.distance(&Self::identity(self.rows()).expect("nonzero dim"))
    }

    /// Checks squareness and ‖A − A†‖_F ≤ tol · max(1, ‖A‖_F).
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows(), cols: self.cols() });
        }
        let residual = self.hermiticity_residual();
        let tolerance = tol * self.frobenius_norm().max(1.0);
        if residual > tolerance {
            return Err(LinalgError::NotHermitian { residual, tolerance });
        }
        Ok(())
    }

    /// (A + A†)/2.
    pub fn hermitian_part(&self) -> Self {
        Self { inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0) }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols(), rhs.rows(), "matmul: inner dimension mismatch");
        Self { inner: &self.inner * &rhs.inner }
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols() != rhs.rows() {
            return Err(LinalgError::DimensionMismatch { left: self.shape(), right: rhs.shape() });
        }
        Ok(self.matmul(rhs))
    }

    /// self · X · self†.
    pub fn conjugate(&self, x: &Self) -> Self {
        self.matmul(x).matmul(&self.adjoint())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        ComplexMatrix { inner: &self.inner + &rhs.inner }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        ComplexMatrix { inner: &self.inner - &rhs.inner }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Spectral decomposition A = V Λ V† of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    /// Non-decreasing.
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector for `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V diag(values) V†.
    pub fn reconstruct_with(&self, values: &[Complex64]) -> ComplexMatrix {
        let v = self.eigenvectors.as_nalgebra();
        let n = self.dim();
        let mut scaled = v.clone();
        for (k, &lambda) in values.iter().enumerate().take(n) {
            for r in 0..n {
                scaled[(r, k)] *= lambda;
            }
        }
        ComplexMatrix { inner: scaled * v.adjoint() }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.reconstruct_with(&values)
    }

    /// ‖V†V − I‖_F.
    pub fn orthonormality_residual(&self) -> f64 {
        self.eigenvectors.unitarity_residual()
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
///
/// The input is symmetrized before factorization; the result is a pure
/// function of the input bits.
pub fn hermitian_eig(a: &ComplexMatrix, hermiticity_tol: f64) -> Result<EigenDecomposition> {
    a.check_hermitian(hermiticity_tol)?;
    let sym = a.hermitian_part();
    let eig = SymmetricEigen::new(sym.inner);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_nalgebra(vectors)?,
    })
}

/// V f(Λ) V† for a real scalar function `f`.
pub fn func_of_hermitian(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a, DEFAULT_HERMITICITY_TOL)?;
    func_of_eig(&eig, f)
}

/// Same as [`func_of_hermitian`] for an existing decomposition.
pub fn func_of_eig(eig: &EigenDecomposition, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let mut values = Vec::with_capacity(eig.dim());
    for &lambda in &eig.eigenvalues {
        let y = f(lambda);
        if !y.is_finite() {
            return Err(LinalgError::NonFiniteResult { eigenvalue: lambda });
        }
        values.push(Complex64::new(y, 0.0));
    }
    Ok(eig.reconstruct_with(&values).hermitian_part())
}

/// e^{−iAt} for Hermitian `a`.
pub fn unitary_exp(a: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(LinalgError::NonFiniteResult { eigenvalue: t });
    }
    let eig = hermitian_eig(a, DEFAULT_HERMITICITY_TOL)?;
    let values: Vec<Complex64> = eig
        .eigenvalues
        .iter()
        .map(|&lambda| Complex64::from_polar(1.0, -lambda * t))
        .collect();
    Ok(eig.reconstruct_with(&values))
}

/// Kronecker product with the default dimension cap.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_capped(a, b, DEFAULT_KRON_CAP)
}

pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows().saturating_mul(b.rows());
    let cols = a.cols().saturating_mul(b.cols());
    let dim = rows.max(cols);
    if dim > cap {
        return Err(LinalgError::DimensionOverflow { dim, cap });
    }
    Ok(ComplexMatrix { inner: a.inner.kronecker(&b.inner) })
}

/// Complex Ginibre matrix with i.i.d. entries (N(0,1) + i N(0,1))/√2.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // Column-major fill order from DMatrix::from_fn is fixed, so draws are reproducible.
    let inner = DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * s, im * s)
    });
    ComplexMatrix::from_nalgebra(inner)
}

/// Haar-distributed unitary: QR of a Ginibre matrix, with the phases of
/// diag(R) absorbed into Q so that R has a real positive diagonal.
pub fn haar_random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<ComplexMatrix> {
    let g = ginibre(dim, dim, rng)?;
    let qr = g.inner.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(q)
}
