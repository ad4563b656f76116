//! Dense symmetric helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{domain, numeric};
use crate::Result;

/// Largest |M − Mᵀ| entry accepted as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 100_000;

/// Largest |M − Mᵀ| entry, or an error for a non-square matrix.
pub fn asymmetry(m: &DMatrix<f64>) -> Result<f64> {
    if !m.is_square() {
        return Err(domain!("matrix is {}x{}, not square", m.nrows(), m.ncols()));
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    Ok(worst)
}

/// Errors unless `m` is square and symmetric within [`SYMMETRY_TOL`].
pub fn check_symmetric(m: &DMatrix<f64>, what: &str) -> Result<()> {
    let a = asymmetry(m)?;
    if a > SYMMETRY_TOL {
        return Err(domain!("{what} is not symmetric (max asymmetry {a:e})"));
    }
    Ok(())
}

/// (M + Mᵀ)/2.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of the symmetric part of `m`.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    if !m.is_square() {
        return Err(domain!("matrix is {}x{}, not square", m.nrows(), m.ncols()));
    }
    SymmetricEigen::try_new(symmetrize(m), f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| numeric!("symmetric eigensolver did not converge on a {}x{} matrix", m.nrows(), m.ncols()))
}

pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    Ok(sym_eigen(m)?.eigenvalues)
}

pub fn lambda_min(m: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigenvalues(m)?.min())
}

pub fn lambda_max(m: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigenvalues(m)?.max())
}

/// Operator norm of a symmetric matrix.
pub fn sym_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigenvalues(m)?.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// Operator norm of an arbitrary matrix, via λ_max(MᵀM) of the smaller Gram matrix.
pub fn op_norm(m: &DMatrix<f64>) -> Result<f64> {
    let gram = if m.nrows() <= m.ncols() { m * m.transpose() } else { m.transpose() * m };
    Ok(libm::sqrt(lambda_max(&gram)?.max(0.0)))
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Kronecker product A ⊗ B.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// V diag(f(λ)) Vᵀ for a symmetric matrix.
pub fn sym_apply<F: Fn(f64) -> f64>(m: &DMatrix<f64>, f: F) -> Result<DMatrix<f64>> {
    let eig = sym_eigen(m)?;
    let vals = eig.eigenvalues.map(f);
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&vals) * v.transpose())
}
