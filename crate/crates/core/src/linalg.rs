//! Dense linear-algebra helpers shared by the estimators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("design matrix is rank deficient")]
    Singular,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Relative pivot tolerance used to declare a least-squares design singular.
pub const RANK_TOL: f64 = 1e-10;

/// Least-squares fit of `y` (n×m) on `x` (n×k), one column of `y` per equation.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// k×m coefficient matrix.
    pub coef: DMatrix<f64>,
    /// n×m residual matrix.
    pub resid: DMatrix<f64>,
    /// (X'X)⁻¹, needed for standard errors.
    pub xtx_inv: DMatrix<f64>,
}

pub fn least_squares(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<LeastSquares, LinalgError> {
    if y.nrows() != x.nrows() {
        return Err(LinalgError::Dimension(format!(
            "{} response rows vs {} design rows",
            y.nrows(),
            x.nrows()
        )));
    }
    let (n, k) = x.shape();
    if k == 0 {
        return Ok(LeastSquares {
            coef: DMatrix::zeros(0, y.ncols()),
            resid: y.clone(),
            xtx_inv: DMatrix::zeros(0, 0),
        });
    }
    if n < k {
        return Err(LinalgError::Singular);
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = (0..k).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if max_diag == 0.0 || (0..k).any(|i| r[(i, i)].abs() <= RANK_TOL * max_diag) {
        return Err(LinalgError::Singular);
    }
    let qty = qr.q().transpose() * y;
    let coef = r
        .solve_upper_triangular(&qty)
        .ok_or(LinalgError::Singular)?;
    let resid = y - x * &coef;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or(LinalgError::Singular)?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(LeastSquares {
        coef,
        resid,
        xtx_inv,
    })
}

/// Residuals of `y` after projecting on the columns of `x`; `y` itself when
/// `x` has no columns.
pub fn residualize(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>, LinalgError> {
    Ok(least_squares(y, x)?.resid)
}

pub fn cholesky_lower(a: &DMatrix<f64>) -> Result<DMatrix<f64>, LinalgError> {
    a.clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or(LinalgError::NotPositiveDefinite)
}

pub fn inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>, LinalgError> {
    a.clone().try_inverse().ok_or(LinalgError::Singular)
}

/// `(a + aᵀ)/2`.
pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// descending; eigenvectors are the matching columns.
pub fn sorted_symmetric_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = a.nrows();
    let eig = SymmetricEigen::new(symmetrize(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Singular values, descending.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values above `rtol · σ_max`.
pub fn numeric_rank(a: &DMatrix<f64>, rtol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        None => 0,
        Some(&0.0) => 0,
        Some(&smax) => s.iter().filter(|&&v| v > rtol * smax).count(),
    }
}

/// Orthonormal basis (n×(n−rank)) of the right null space of `a` (m×n).
pub fn null_space(a: &DMatrix<f64>, rtol: f64) -> DMatrix<f64> {
    let (m, n) = a.shape();
    if m == 0 {
        return DMatrix::identity(n, n);
    }
    // Pad with zero rows so the SVD returns a full n×n right factor.
    let rows = m.max(n);
    let mut padded = DMatrix::zeros(rows, n);
    padded.view_mut((0, 0), (m, n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..n)
        .filter(|&i| smax == 0.0 || s[i] <= rtol * smax)
        .collect();
    let mut basis = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &vt.row(i).transpose());
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of the column space of a
/// full-column-rank K×r matrix.
pub fn orth_complement(a: &DMatrix<f64>) -> DMatrix<f64> {
    null_space(&a.transpose(), 1e-10)
}

pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Commutation matrix `K_{mn}` with `K vec(A) = vec(Aᵀ)` for m×n `A`.
pub fn commutation(m: usize, n: usize) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            // vec(A)[j*m + i] = A[i,j]  ->  vec(Aᵀ)[i*n + j]
            k[(i * n + j, j * m + i)] = 1.0;
        }
    }
    k
}

/// Column-major vectorization.
pub fn vec(a: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(a.as_slice())
}

pub fn unvec(v: &DVector<f64>, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_column_slice(rows, cols, v.as_slice())
}

pub fn frobenius(a: &DMatrix<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
