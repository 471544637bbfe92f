//! Decomposition kernels (Hermitian eigen, SVD, general complex eigenvalues,
//! inversion) backed by nalgebra behind the [`CMat`] interface.

use super::{CMat, C64};
use crate::error::{Error, Result};
use nalgebra::DMatrix;

fn to_na(m: &CMat) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

fn from_na(m: &DMatrix<C64>) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Eigendecomposition of a Hermitian matrix. Returns eigenvalues in
/// ascending order and the matching eigenvectors as columns.
pub fn hermitian_eig(m: &CMat) -> (Vec<f64>, CMat) {
    assert!(m.is_square(), "hermitian_eig needs a square matrix");
    let se = to_na(m).symmetric_eigen();
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vecs = CMat::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    (vals, vecs)
}

/// Thin SVD `m = u * diag(s) * v_dag` with singular values in descending
/// order; `u` is rows x r, `v_dag` is r x cols with r = min(rows, cols).
pub fn svd(m: &CMat) -> (CMat, Vec<f64>, CMat) {
    let svd = to_na(m).svd(true, true);
    let u = svd.u.as_ref().expect("svd: u requested");
    let vt = svd.v_t.as_ref().expect("svd: v_t requested");
    let r = svd.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let s: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    let u_s = CMat::from_fn(u.nrows(), r, |i, j| u[(i, order[j])]);
    let vt_s = CMat::from_fn(r, vt.ncols(), |i, j| vt[(order[i], j)]);
    (u_s, s, vt_s)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let sv = to_na(m).singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Orthonormal basis of the (right) kernel: right singular vectors whose
/// singular value is at most `rel_tol` times the largest one. Falls back to
/// an absolute threshold when the matrix is numerically zero.
pub fn kernel_basis(m: &CMat, rel_tol: f64) -> CMat {
    let (_, s, vdag) = svd(m);
    let smax = s.first().copied().unwrap_or(0.0);
    let tol = if smax > 1e-12 { rel_tol * smax } else { 1e-12 };
    let cols: Vec<Vec<C64>> = (0..s.len())
        .filter(|&k| s[k] <= tol)
        .map(|k| (0..m.cols()).map(|j| vdag[(k, j)].conj()).collect())
        .collect();
    // a wide matrix has extra kernel directions not visible in the thin SVD
    let mut basis = CMat::from_columns(m.cols(), &cols);
    if m.rows() < m.cols() {
        let missing = m.cols() - m.rows();
        let v_full = null_completion(&vdag, missing);
        let mut all = cols;
        all.extend(v_full);
        basis = CMat::from_columns(m.cols(), &all);
    }
    basis
}

/// Completes the rows of `vdag` (orthonormal) with `missing` further
/// orthonormal vectors of the ambient space.
fn null_completion(vdag: &CMat, missing: usize) -> Vec<Vec<C64>> {
    let n = vdag.cols();
    let have: Vec<Vec<C64>> = (0..vdag.rows())
        .map(|i| (0..n).map(|j| vdag[(i, j)].conj()).collect())
        .collect();
    let mut cols = have;
    let mut fresh = Vec::new();
    for cand in 0..n {
        if fresh.len() == missing {
            break;
        }
        let mut w: Vec<C64> = (0..n)
            .map(|i| if i == cand { super::ONE } else { super::ZERO })
            .collect();
        for _ in 0..2 {
            for c in cols.iter().chain(fresh.iter()) {
                let ip: C64 = c.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for i in 0..n {
                    w[i] -= ip * c[i];
                }
            }
        }
        let nn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nn > 1e-6 {
            for z in &mut w {
                *z /= nn;
            }
            fresh.push(w);
        }
    }
    cols.clear();
    fresh
}

/// Eigenvalues of a general complex square matrix via its Schur form.
pub fn complex_eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    assert!(m.is_square(), "eigenvalues of a non-square matrix");
    let schur = to_na(m)
        .try_schur(1e-14, 100_000)
        .ok_or(Error::EigenSolverFailed)?;
    let vals = schur.eigenvalues().ok_or(Error::EigenSolverFailed)?;
    Ok(vals.iter().copied().collect())
}

/// Matrix inverse; errors when the matrix is singular.
pub fn inverse(m: &CMat) -> Result<CMat> {
    assert!(m.is_square(), "inverse of a non-square matrix");
    to_na(m)
        .try_inverse()
        .map(|inv| from_na(&inv))
        .ok_or(Error::SingularResolvent)
}

/// Square root of a PSD matrix (eigenvalues clipped at zero).
pub fn matrix_sqrt_psd(m: &CMat) -> Result<CMat> {
    super::psd_sqrt_checked(m)
}
