//! Dense matrix kernel: norms, symmetric-definite square roots, and the
//! spectral decomposition of skew-symmetric matrices.
//!
//! Everything downstream works with matrices `R = ω + β` where `ω` is
//! symmetric positive definite and `β` is skew-symmetric. This module owns the
//! validated wrapper types for both parts and the eigen-machinery they need:
//! `ω^{±1/2}` through a cached symmetric eigendecomposition, and the unitary
//! diagonalization `β = C₁ diag(iσ_j) C₁*` obtained from the Hermitian matrix
//! `i·β`, with the `σ_j` re-sorted into ± pairs (`σ_n = 0` for odd n).

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::max_abs;
#[cfg(test)]
use crate::report::mat_residual;

/// Square real matrix, row-major semantics.
pub type RealMatrix = DMatrix<f64>;
/// Square complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Validation tolerances, relative unless stated otherwise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// Symmetry / skew-symmetry of inputs.
    pub sym: f64,
    /// Unitarity of eigenvector matrices.
    pub unit: f64,
    /// Reconstruction and cross-check residuals.
    pub rec: f64,
    /// Absolute floor for the smallest eigenvalue of a definite matrix.
    pub lambda_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sym: 1e-9,
            unit: 1e-9,
            rec: 1e-9,
            lambda_floor: 1e-12,
        }
    }
}

/// Operator (largest singular value) and Frobenius norms of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    pub operator: f64,
    pub frobenius: f64,
}

/// Computes both norms. The operator norm is obtained as
/// `sqrt(λ_max(M* M))`, which is the largest singular value.
pub fn norms<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> Norms {
    let frobenius = m
        .iter()
        .map(|x| x.clone().modulus_squared())
        .sum::<f64>()
        .sqrt();
    if m.is_empty() {
        return Norms {
            operator: 0.0,
            frobenius,
        };
    }
    let gram = m.adjoint() * m;
    let lambda_max = gram
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l));
    Norms {
        operator: lambda_max.max(0.0).sqrt(),
        frobenius,
    }
}

fn check_square_finite(m: &RealMatrix) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::DimensionMismatch(format!(
            "expected square matrix, got {rows}x{cols}"
        )));
    }
    if rows == 0 {
        return Err(Error::BadInput("empty matrix".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::BadInput("matrix has non-finite entries".into()));
    }
    Ok(rows)
}

/// Symmetric positive definite matrix with its eigendecomposition cached.
///
/// Construction validates symmetry (relative tolerance) and positivity
/// (`λ_min` above an absolute floor); the eigen-pairs are stored sorted
/// ascending so `λ_min`, `λ_max`, determinants and the `ω^{±1/2}` roots come
/// for free afterwards.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    matrix: RealMatrix,
    eigvals: DVector<f64>,
    eigvecs: RealMatrix,
}

impl SpdMatrix {
    pub fn new(m: RealMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: RealMatrix, tol: &Tolerances) -> Result<Self> {
        let n = check_square_finite(&m)?;
        let asym = max_abs(&(&m - m.transpose()));
        if asym > tol.sym * (1.0 + max_abs(&m)) {
            return Err(Error::NotSpd(format!(
                "asymmetry {asym:.3e} exceeds tolerance"
            )));
        }
        // eigendecompose the symmetrized matrix so tiny asymmetries cannot
        // leak into the cached spectral data
        let symm = (&m + m.transpose()) * 0.5;
        let eig = symm
            .try_symmetric_eigen(f64::EPSILON, 10_000)
            .ok_or(Error::ConvergenceFailure)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigvals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigvecs = RealMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        if eigvals[0] <= tol.lambda_floor {
            return Err(Error::NotSpd(format!(
                "smallest eigenvalue {:.3e} is not positive",
                eigvals[0]
            )));
        }
        Ok(SpdMatrix {
            matrix: m,
            eigvals,
            eigvecs,
        })
    }

    fn from_eigen(eigvals: DVector<f64>, eigvecs: RealMatrix) -> Self {
        let m = &eigvecs * RealMatrix::from_diagonal(&eigvals) * eigvecs.transpose();
        // symmetrize away assembly rounding
        let matrix = (&m + m.transpose()) * 0.5;
        SpdMatrix {
            matrix,
            eigvals,
            eigvecs,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    /// Eigenvalues sorted ascending.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigvals
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigvals[0]
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigvals[self.dim() - 1]
    }

    pub fn det(&self) -> f64 {
        self.eigvals.iter().product()
    }

    /// `Tr ω^{-1} = Σ 1/λ_i`.
    pub fn trace_inverse(&self) -> f64 {
        self.eigvals.iter().map(|l| 1.0 / l).sum()
    }

    pub fn inverse(&self) -> RealMatrix {
        let d = DVector::from_iterator(self.dim(), self.eigvals.iter().map(|l| 1.0 / l));
        let m = &self.eigvecs * RealMatrix::from_diagonal(&d) * self.eigvecs.transpose();
        (&m + m.transpose()) * 0.5
    }
}

/// Symmetric-definite square root and inverse square root of `ω`.
///
/// Both results carry their own eigendecomposition (same eigenbasis, rooted
/// eigenvalues), so chaining is cheap.
pub fn spd_roots(omega: &SpdMatrix) -> (SpdMatrix, SpdMatrix) {
    let sqrt_vals = omega.eigvals.map(|l| l.sqrt());
    let inv_sqrt_vals = omega.eigvals.map(|l| 1.0 / l.sqrt());
    (
        SpdMatrix::from_eigen(sqrt_vals, omega.eigvecs.clone()),
        SpdMatrix::from_eigen(inv_sqrt_vals, omega.eigvecs.clone()),
    )
}

/// Skew-symmetric matrix stored as its strict upper triangle, so
/// `β + βᵀ = 0` holds exactly by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    n: usize,
    upper: Vec<f64>,
}

impl SkewMatrix {
    /// Validates `m + mᵀ ≈ 0` (relative tolerance) and keeps the strict
    /// upper triangle.
    pub fn try_new(m: &RealMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: &RealMatrix, tol: &Tolerances) -> Result<Self> {
        let n = check_square_finite(m)?;
        let skew_defect = max_abs(&(m + m.transpose()));
        if skew_defect > tol.sym * (1.0 + max_abs(m)) {
            return Err(Error::NotSkew(format!(
                "skew defect {skew_defect:.3e} exceeds tolerance"
            )));
        }
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for k in (i + 1)..n {
                upper.push(0.5 * (m[(i, k)] - m[(k, i)]));
            }
        }
        Ok(SkewMatrix { n, upper })
    }

    pub fn zero(n: usize) -> Self {
        SkewMatrix {
            n,
            upper: vec![0.0; n * (n - 1) / 2],
        }
    }

    /// Builds from strict upper-triangle entries in row-major order
    /// (`(0,1), (0,2), …, (n-2,n-1)`).
    pub fn from_upper(n: usize, upper: Vec<f64>) -> Result<Self> {
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected {} strict upper entries for n={n}, got {}",
                n * (n - 1) / 2,
                upper.len()
            )));
        }
        if upper.iter().any(|x| !x.is_finite()) {
            return Err(Error::BadInput("non-finite entries".into()));
        }
        Ok(SkewMatrix { n, upper })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.upper.iter().all(|&x| x == 0.0)
    }

    /// Materializes the full matrix; antisymmetry is exact.
    pub fn to_matrix(&self) -> RealMatrix {
        let mut m = RealMatrix::zeros(self.n, self.n);
        let mut idx = 0;
        for i in 0..self.n {
            for k in (i + 1)..self.n {
                m[(i, k)] = self.upper[idx];
                m[(k, i)] = -self.upper[idx];
                idx += 1;
            }
        }
        m
    }

    pub fn scale(&self, factor: f64) -> Self {
        SkewMatrix {
            n: self.n,
            upper: self.upper.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn norms(&self) -> Norms {
        norms(&self.to_matrix())
    }
}

/// Eigen-data of a skew-symmetric matrix `β`: real values `σ_j` and a unitary
/// `C₁` with `β = C₁ diag(iσ_j) C₁*`.
///
/// The `σ_j` are ordered as exact ± pairs, `(σ₁, -σ₁, σ₂, -σ₂, …)` with
/// `σ_n = 0` appended when n is odd.
#[derive(Debug, Clone)]
pub struct SkewSpectrum {
    sigmas: Vec<f64>,
    unitary: ComplexMatrix,
}

impl SkewSpectrum {
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn dim(&self) -> usize {
        self.sigmas.len()
    }

    pub fn max_abs_sigma(&self) -> f64 {
        self.sigmas.iter().fold(0.0f64, |acc, &s| acc.max(s.abs()))
    }

    /// `Π (1 + σ_j²)` over one representative of each ± pair; multiplying
    /// `det ω` by this factor gives `det R`.
    pub fn det_product_factor(&self) -> f64 {
        let n = self.sigmas.len();
        (0..n / 2).map(|j| 1.0 + self.sigmas[2 * j].powi(2)).product()
    }

    /// `C₁ diag(iσ_j) C₁*`, real part (the exact value is real).
    pub fn reconstruct(&self) -> RealMatrix {
        let n = self.dim();
        let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            n,
            self.sigmas.iter().map(|&s| Complex64::new(0.0, s)),
        ));
        let rec = &self.unitary * d * self.unitary.adjoint();
        rec.map(|z| z.re)
    }
}

/// Spectral decomposition of a skew-symmetric matrix via the Hermitian
/// eigendecomposition of `i·β`.
///
/// Eigenvalues are sorted descending and paired extremes-inward; each pair is
/// symmetrized to make `σ_{2j-1} = -σ_{2j}` exact, and the leftover middle
/// value of an odd dimension is snapped to zero. Ties keep eigensolver order.
pub fn skew_spectrum(beta: &SkewMatrix) -> Result<SkewSpectrum> {
    let n = beta.dim();
    let b = beta.to_matrix();
    let h: ComplexMatrix = b.map(|x| Complex64::new(0.0, x));
    let eig = h
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or(Error::ConvergenceFailure)?;
    // eigenpair (h_j, c_j) of i·β gives β c_j = i(-h_j) c_j
    let raw: Vec<f64> = eig.eigenvalues.iter().map(|h| -h).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| raw[b].total_cmp(&raw[a]).then(a.cmp(&b)));

    let mut sigmas = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    for j in 0..n / 2 {
        let hi = order[j];
        let lo = order[n - 1 - j];
        let s = 0.5 * (raw[hi] - raw[lo]);
        sigmas.push(s);
        sigmas.push(-s);
        columns.push(eig.eigenvectors.column(hi).into_owned());
        columns.push(eig.eigenvectors.column(lo).into_owned());
    }
    if n % 2 == 1 {
        sigmas.push(0.0);
        columns.push(eig.eigenvectors.column(order[n / 2]).into_owned());
    }
    Ok(SkewSpectrum {
        sigmas,
        unitary: ComplexMatrix::from_columns(&columns),
    })
}

/// Row-major nested-array form, the JSON wire format for matrices.
pub fn matrix_to_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

/// Parses a square matrix from row-major nested arrays.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<RealMatrix> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::BadInput("empty matrix literal".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::BadInput(format!(
            "matrix literal rows must all have length {n}"
        )));
    }
    let m = RealMatrix::from_fn(n, n, |i, j| rows[i][j]);
    check_square_finite(&m)?;
    Ok(m)
}

/// serde adapter: `#[serde(with = "crate::matrix::json_rows")]` maps a
/// `RealMatrix` to row-major nested JSON arrays.
pub mod json_rows {
    use super::{matrix_from_rows, matrix_to_rows, RealMatrix};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &RealMatrix, ser: S) -> Result<S::Ok, S::Error> {
        matrix_to_rows(m).serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<RealMatrix, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(de)?;
        matrix_from_rows(&rows).map_err(serde::de::Error::custom)
    }
}
