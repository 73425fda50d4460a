//! Thin wrappers over faer's dense Hermitian kernels.
//!
//! faer is built without its rayon backend, so every call here runs
//! sequentially and yields identical bits regardless of how many instances
//! are processed concurrently.

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::C64;

/// Largest entrywise deviation `|A_ij - conj(A_ji)|`.
pub fn hermitian_defect(a: MatRef<'_, C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    a.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigenvalue solver failed: {e:?}")))
}

/// Full eigendecomposition of a Hermitian matrix: ascending eigenvalues and
/// the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigh(a: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigen decomposition failed: {e:?}")))?;
    let values = evd.S().column_vector().iter().map(|z| z.re).collect();
    Ok((values, evd.U().to_owned()))
}

/// Singular values in non-increasing order.
pub fn singular_values(a: MatRef<'_, C64>) -> Result<Vec<f64>> {
    a.singular_values()
        .map_err(|e| Error::Numerical(format!("singular value solver failed: {e:?}")))
}
