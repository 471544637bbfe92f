//! Dense complex linear algebra shared by all modules: tensor products,
//! partial traces, fidelity, norms, isometry completion, support projections.
//!
//! Conventions fixed here and used everywhere else in the crate:
//! - matrices are stored row-major;
//! - `vec` flattens a matrix row-major, so the matrix of `X -> K X K^†`
//!   acting on `vec(X)` is `K ⊗ conj(K)`;
//! - rank and support decisions use an absolute eigenvalue threshold of
//!   `1e-9` by default, kernel decisions a threshold of `1e-9` relative to
//!   the largest singular value.
//!
//! All sizes here are desk scale (dimension at most a few hundred), so
//! decompositions favour exactness over speed: PSD inputs are symmetrized
//! and eigen-clipped, matrix square roots go through a Hermitian
//! eigendecomposition, and matrix exponentials of Hermitian generators are
//! computed spectrally.

mod decomp;

pub use decomp::{
    complex_eigenvalues, hermitian_eig, inverse, kernel_basis, matrix_sqrt_psd, singular_values,
    svd,
};

use crate::error::{Error, Result};
use num_complex::Complex;

pub type C64 = Complex<f64>;

pub const ONE: C64 = Complex::new(1.0, 0.0);
pub const ZERO: C64 = Complex::new(0.0, 0.0);
pub const I: C64 = Complex::new(0.0, 1.0);

/// Default absolute threshold for rank/support decisions.
pub const SUPPORT_TOL: f64 = 1e-9;
/// Default relative threshold for kernel decisions (w.r.t. the largest singular value).
pub const KERNEL_REL_TOL: f64 = 1e-9;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for CMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl CMat {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        let m = CMat { rows, cols, data };
        if !m.is_finite() {
            return Err(Error::NonFiniteEntries);
        }
        Ok(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMat::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Convenience constructor from real entries, row-major.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        CMat::new(
            rows,
            cols,
            entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let lhs = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    out.data[dst + j] += a * other.data[lhs + j];
                }
            }
        }
        out
    }

    /// `A · x` for a column vector.
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        let mut out = vec![ZERO; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            *slot = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// `L · X · L^†`, skipping exact zeros of `L`. This is the inner loop of
    /// channel application; structured Kraus operators (embeddings,
    /// projections, basis bras) are mostly zero.
    pub fn sandwich(&self, x: &CMat) -> CMat {
        assert_eq!(self.cols, x.rows, "sandwich dimension mismatch");
        assert!(x.is_square(), "sandwich needs a square middle factor");
        // tmp = L · X
        let tmp = self.mul(x);
        // out = tmp · L^†  (out[i,j] = sum_k tmp[i,k] conj(L[j,k]))
        let mut out = CMat::zeros(self.rows, self.rows);
        for j in 0..self.rows {
            for k in 0..self.cols {
                let l = self[(j, k)];
                if l == ZERO {
                    continue;
                }
                let lc = l.conj();
                for i in 0..self.rows {
                    out[(i, j)] += tmp[(i, k)] * lc;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: C64) -> CMat {
        let data = self.data.iter().map(|a| a * s).collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> CMat {
        let data = self.data.iter().map(|z| z.conj()).collect();
        CMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Hilbert-Schmidt inner product `tr(A^† B)`, conjugate-linear in `self`.
    pub fn hs_inner(&self, other: &CMat) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator (spectral) norm.
    pub fn op_norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    /// `(M + M^†)/2`; guards chained products against 1e-14 asymmetry.
    pub fn symmetrize(&self) -> CMat {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn column_ket(&self, j: usize) -> Ket {
        Ket::from_vec(self.column(j))
    }

    /// Horizontal stack of column vectors into a matrix.
    pub fn from_columns(dim: usize, cols: &[Vec<C64>]) -> CMat {
        let mut m = CMat::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), dim);
            for i in 0..dim {
                m[(i, j)] = c[i];
            }
        }
        m
    }

    /// Row-major flattening of the matrix.
    pub fn vec_flatten(&self) -> Vec<C64> {
        self.data.clone()
    }

    /// Inverse of `vec_flatten` for square matrices.
    pub fn unflatten(dim_rows: usize, dim_cols: usize, v: &[C64]) -> CMat {
        assert_eq!(v.len(), dim_rows * dim_cols);
        CMat {
            rows: dim_rows,
            cols: dim_cols,
            data: v.to_vec(),
        }
    }
}

/// Complex column vector; flagged unit vectors are checked to norm 1e-10.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amps: Vec<C64>,
}

impl Ket {
    pub fn from_vec(amps: Vec<C64>) -> Self {
        Ket { amps }
    }

    pub fn unit(amps: Vec<C64>) -> Result<Self> {
        let k = Ket { amps };
        let n = k.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(n));
        }
        Ok(k)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ket { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Ket {
        let n = self.norm();
        Ket {
            amps: self.amps.iter().map(|z| z / n).collect(),
        }
    }

    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|self><other|`.
    pub fn outer(&self, other: &Ket) -> CMat {
        CMat::from_fn(self.dim(), other.dim(), |i, j| {
            self.amps[i] * other.amps[j].conj()
        })
    }

    /// `|self><self|`.
    pub fn projector(&self) -> CMat {
        self.outer(self)
    }

    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket { amps }
    }

    pub fn add(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim());
        Ket {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Ket {
        Ket {
            amps: self.amps.iter().map(|a| a * s).collect(),
        }
    }

    /// As a dim x 1 matrix.
    pub fn as_column(&self) -> CMat {
        CMat {
            rows: self.dim(),
            cols: 1,
            data: self.amps.clone(),
        }
    }
}

/// Orthonormal-basis representation of a linear subspace. The basis matrix is
/// ambient_dim x k with orthonormal columns; k = 0 is the zero subspace.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient_dim: usize,
    basis: CMat,
}

impl Subspace {
    pub fn new(ambient_dim: usize, basis: CMat) -> Result<Self> {
        if basis.rows() != ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "subspace basis has {} rows, ambient dimension is {}",
                basis.rows(),
                ambient_dim
            )));
        }
        if basis.cols() > ambient_dim {
            return Err(Error::DimensionMismatch(format!(
                "subspace dimension {} exceeds ambient dimension {}",
                basis.cols(),
                ambient_dim
            )));
        }
        if basis.cols() > 0 {
            let gram = basis.adjoint().mul(&basis);
            let resid = gram.sub(&CMat::identity(basis.cols())).max_abs();
            if resid > 1e-10 {
                return Err(Error::NotOrthonormal(resid));
            }
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub fn full(dim: usize) -> Self {
        Subspace {
            ambient_dim: dim,
            basis: CMat::identity(dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Subspace {
            ambient_dim: dim,
            basis: CMat::zeros(dim, 0),
        }
    }

    pub fn line(v: &Ket) -> Result<Self> {
        let n = v.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnitVector(n));
        }
        Subspace::new(v.dim(), v.as_column())
    }

    /// Orthonormal basis for the column span of `a`, rank-truncated at
    /// `rel_tol` relative to the largest singular value.
    pub fn from_span(a: &CMat, rel_tol: f64) -> Self {
        if a.cols() == 0 {
            return Subspace::zero(a.rows());
        }
        let (u, s, _) = svd(a);
        let smax = s.first().copied().unwrap_or(0.0);
        let k = s
            .iter()
            .filter(|&&x| x > rel_tol * smax.max(1e-300))
            .count();
        let basis = CMat::from_fn(a.rows(), k, |i, j| u[(i, j)]);
        Subspace {
            ambient_dim: a.rows(),
            basis,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn basis_ket(&self, j: usize) -> Ket {
        self.basis.column_ket(j)
    }

    /// Orthogonal projection onto the subspace.
    pub fn projector(&self) -> CMat {
        if self.dim() == 0 {
            return CMat::zeros(self.ambient_dim, self.ambient_dim);
        }
        self.basis.mul(&self.basis.adjoint())
    }

    /// Norm of the component of `v` inside the subspace.
    pub fn overlap(&self, v: &Ket) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        let coeffs = self.basis.adjoint().mul_vec(v.amps());
        coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn contains(&self, v: &Ket, tol: f64) -> bool {
        let n = v.norm();
        (self.overlap(v) - n).abs() <= tol
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let p = CMat::identity(self.ambient_dim).sub(&self.projector());
        let (vals, vecs) = hermitian_eig(&p);
        let mut cols = Vec::new();
        for (j, &lam) in vals.iter().enumerate() {
            if lam > 0.5 {
                cols.push(vecs.column(j));
            }
        }
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: CMat::from_columns(self.ambient_dim, &cols),
        }
    }

    /// Intersection of two subspaces of the same ambient space.
    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient_dim, other.ambient_dim);
        let d = self.ambient_dim;
        let q = CMat::identity(d)
            .sub(&self.projector())
            .add(&CMat::identity(d).sub(&other.projector()));
        let (vals, vecs) = hermitian_eig(&q);
        let mut cols = Vec::new();
        for (j, &lam) in vals.iter().enumerate() {
            if lam < 1e-9 {
                cols.push(vecs.column(j));
            }
        }
        let raw = CMat::from_columns(d, &cols);
        if raw.cols() == 0 {
            return Subspace::zero(d);
        }
        Subspace::from_span(&raw, KERNEL_REL_TOL)
    }
}

/// Kronecker product; dimensions multiply.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut out = CMat::zeros(rows, cols);
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let s = a[(ia, ja)];
            if s == ZERO {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Partial trace of an operator on a bipartite space of dimensions
/// `dim_first * dim_second`, tracing out the discarded factor.
pub fn partial_trace(m: &CMat, dim_first: usize, dim_second: usize, keep: Keep) -> Result<CMat> {
    let d = dim_first * dim_second;
    if m.rows() != d || m.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix with factor dims {}x{}",
            m.rows(),
            m.cols(),
            dim_first,
            dim_second
        )));
    }
    match keep {
        Keep::First => {
            let mut out = CMat::zeros(dim_first, dim_first);
            for i in 0..dim_first {
                for j in 0..dim_first {
                    let mut acc = ZERO;
                    for b in 0..dim_second {
                        acc += m[(i * dim_second + b, j * dim_second + b)];
                    }
                    out[(i, j)] = acc;
                }
            }
            Ok(out)
        }
        Keep::Second => {
            let mut out = CMat::zeros(dim_second, dim_second);
            for a in 0..dim_second {
                for b in 0..dim_second {
                    let mut acc = ZERO;
                    for i in 0..dim_first {
                        acc += m[(i * dim_second + a, i * dim_second + b)];
                    }
                    out[(a, b)] = acc;
                }
            }
            Ok(out)
        }
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

/// Checks `m` is PSD up to `-tol` on the eigenvalues and returns the clipped
/// eigendecomposition `(values >= 0, eigenvectors)`.
fn psd_eig_clipped(m: &CMat, tol: f64) -> Result<(Vec<f64>, CMat)> {
    let (vals, vecs) = hermitian_eig(&m.symmetrize());
    let scale = vals.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
    if let Some(&min) = vals.first() {
        if min < -tol * scale {
            return Err(Error::NotPositiveSemiDefinite { min_eig: min });
        }
    }
    Ok((vals.iter().map(|&v| v.max(0.0)).collect(), vecs))
}

/// Root fidelity `||sqrt(rho) sqrt(sigma)||_1`, symmetric in its arguments.
pub fn fidelity_root(rho: &CMat, sigma: &CMat) -> Result<f64> {
    if rho.rows() != sigma.rows() || !rho.is_square() || !sigma.is_square() {
        return Err(Error::DimensionMismatch(
            "fidelity needs two square matrices of equal dimension".into(),
        ));
    }
    let sr = psd_sqrt_checked(rho)?;
    let ss = psd_sqrt_checked(sigma)?;
    Ok(trace_norm(&sr.mul(&ss)))
}

fn psd_sqrt_checked(m: &CMat) -> Result<CMat> {
    let (vals, vecs) = psd_eig_clipped(m, 1e-10)?;
    let d = m.rows();
    let mut out = CMat::zeros(d, d);
    for (j, &lam) in vals.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        let col = vecs.column(j);
        let s = lam.sqrt();
        for a in 0..d {
            for b in 0..d {
                out[(a, b)] += C64::new(s, 0.0) * col[a] * col[b].conj();
            }
        }
    }
    Ok(out)
}

/// Extends a d x k matrix with orthonormal columns to a d x d unitary whose
/// first k columns equal the input. The completion is deterministic.
pub fn complete_isometry_to_unitary(v_iso: &CMat) -> Result<CMat> {
    let d = v_iso.rows();
    let k = v_iso.cols();
    if k > d {
        return Err(Error::DimensionMismatch(format!(
            "isometry has more columns ({}) than rows ({})",
            k, d
        )));
    }
    if k > 0 {
        let resid = v_iso.adjoint().mul(v_iso).sub(&CMat::identity(k)).max_abs();
        if resid > 1e-10 {
            return Err(Error::NotOrthonormal(resid));
        }
    }
    let mut cols: Vec<Vec<C64>> = (0..k).map(|j| v_iso.column(j)).collect();
    for cand in 0..d {
        if cols.len() == d {
            break;
        }
        let mut w: Vec<C64> = (0..d).map(|i| if i == cand { ONE } else { ZERO }).collect();
        // two Gram-Schmidt passes for orthogonality at machine precision
        for _ in 0..2 {
            for c in &cols {
                let ip: C64 = c.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for i in 0..d {
                    w[i] -= ip * c[i];
                }
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            for z in &mut w {
                *z /= n;
            }
            cols.push(w);
        }
    }
    if cols.len() != d {
        return Err(Error::NotOrthonormal(f64::NAN));
    }
    Ok(CMat::from_columns(d, &cols))
}

/// Orthogonal projection onto the span of eigenvectors of a PSD matrix with
/// eigenvalue above `tol`.
pub fn support_projection(m: &CMat, tol: f64) -> CMat {
    let (vals, vecs) = hermitian_eig(&m.symmetrize());
    let d = m.rows();
    let mut out = CMat::zeros(d, d);
    for (j, &lam) in vals.iter().enumerate() {
        if lam > tol {
            let col = vecs.column(j);
            for a in 0..d {
                for b in 0..d {
                    out[(a, b)] += col[a] * col[b].conj();
                }
            }
        }
    }
    out
}

/// Rank of a PSD matrix at threshold `tol`.
pub fn psd_rank(m: &CMat, tol: f64) -> usize {
    let (vals, _) = hermitian_eig(&m.symmetrize());
    vals.iter().filter(|&&v| v > tol).count()
}

/// `exp(factor * H)` for self-adjoint `H`, via spectral decomposition.
/// `expm_scaled(h, -i t)` gives the unitary `exp(-i H t)` to machine precision.
pub fn expm_scaled(h: &CMat, factor: C64) -> CMat {
    let (vals, vecs) = hermitian_eig(h);
    let d = h.rows();
    let mut out = CMat::zeros(d, d);
    for (j, &lam) in vals.iter().enumerate() {
        let col = vecs.column(j);
        let w = (factor * C64::new(lam, 0.0)).exp();
        for a in 0..d {
            for b in 0..d {
                out[(a, b)] += w * col[a] * col[b].conj();
            }
        }
    }
    out
}

/// Deterministic unit vector orthogonal to `v` (first Gram-Schmidt completion
/// of the standard basis). Needs dim >= 2.
pub fn orthogonal_completion_vector(v: &Ket) -> Ket {
    let d = v.dim();
    assert!(d >= 2, "no orthogonal direction in dimension < 2");
    for cand in 0..d {
        let mut w: Vec<C64> = (0..d).map(|i| if i == cand { ONE } else { ZERO }).collect();
        let ip: C64 = v.amps().iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
        for (wi, vi) in w.iter_mut().zip(v.amps()) {
            *wi -= ip * vi;
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            return Ket::from_vec(w.into_iter().map(|z| z / n).collect());
        }
    }
    unreachable!("a unit vector cannot span the whole space in dimension >= 2");
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pauli_y() -> CMat {
        CMat::new(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
    }

    #[test]
    fn kron_identity_case() {
        let i2 = CMat::identity(2);
        assert_eq!(kron(&i2, &i2), CMat::identity(4));
    }

    #[test]
    fn kron_pauli_y_with_projector() {
        // sigma_y (x) |0><0|: direct index expansion oracle
        let p0 = Ket::basis(2, 0).projector();
        let got = kron(&pauli_y(), &p0);
        let mut want = CMat::zeros(4, 4);
        for ia in 0..2 {
            for ja in 0..2 {
                for ib in 0..2 {
                    for jb in 0..2 {
                        want[(2 * ia + ib, 2 * ja + jb)] = pauli_y()[(ia, ja)] * p0[(ib, jb)];
                    }
                }
            }
        }
        assert!(got.sub(&want).max_abs() < 1e-15);
    }

    #[test]
    fn kron_basis_kets() {
        let v = Ket::basis(2, 0).as_column();
        let p = Ket::basis(2, 1).as_column();
        let t = kron(&v, &p);
        assert_eq!(t.rows(), 4);
        assert_eq!(t.cols(), 1);
        assert_eq!(t[(1, 0)], ONE);
        assert_eq!(t[(0, 0)], ZERO);
        assert_eq!(t[(2, 0)], ZERO);
        assert_eq!(t[(3, 0)], ZERO);
    }

    #[test]
    fn partial_trace_product_state() {
        let rho = CMat::new(
            2,
            2,
            vec![
                C64::new(0.7, 0.0),
                C64::new(0.1, 0.2),
                C64::new(0.1, -0.2),
                C64::new(0.3, 0.0),
            ],
        )
        .unwrap();
        let sigma = CMat::new(
            2,
            2,
            vec![C64::new(0.4, 0.0), ZERO, ZERO, C64::new(0.6, 0.0)],
        )
        .unwrap();
        let joint = kron(&rho, &sigma);
        let back = partial_trace(&joint, 2, 2, Keep::First).unwrap();
        assert!(back.sub(&rho).max_abs() < 1e-14);
        let other = partial_trace(&joint, 2, 2, Keep::Second).unwrap();
        assert!(other.sub(&sigma).max_abs() < 1e-14);
    }

    #[test]
    fn partial_trace_bell_state() {
        // |Phi+> on 2x2, keep first -> I/2 (expansion in the computational basis)
        let amps = vec![
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ZERO,
            ZERO,
            C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        ];
        let bell = Ket::from_vec(amps).projector();
        let red = partial_trace(&bell, 2, 2, Keep::First).unwrap();
        assert!(
            red.sub(&CMat::identity(2).scale(C64::new(0.5, 0.0)))
                .max_abs()
                < 1e-14
        );
    }

    #[test]
    fn partial_trace_identity() {
        let red = partial_trace(&CMat::identity(4), 2, 2, Keep::First).unwrap();
        assert!(
            red.sub(&CMat::identity(2).scale(C64::new(2.0, 0.0)))
                .max_abs()
                < 1e-14
        );
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        assert!(partial_trace(&CMat::identity(4), 2, 3, Keep::First).is_err());
    }

    #[test]
    fn fidelity_identical_state_is_one() {
        let rho = CMat::from_real(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((fidelity_root(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_orthogonal_pure_states() {
        let a = Ket::basis(2, 0).projector();
        let b = Ket::basis(2, 1).projector();
        assert!(fidelity_root(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn fidelity_mixed_vs_pure_closed_form() {
        // rho = diag(0.5,0.5), sigma = |0><0| -> sqrt(<0|rho|0>) = sqrt(0.5)
        let rho = CMat::from_real(2, 2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        let sigma = Ket::basis(2, 0).projector();
        assert!((fidelity_root(&rho, &sigma).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fidelity_rejects_non_psd() {
        let m = CMat::from_real(2, 2, &[1.0, 0.0, 0.0, -0.5]).unwrap();
        let rho = CMat::identity(2);
        assert!(fidelity_root(&m, &rho).is_err());
    }

    #[test]
    fn trace_norm_values() {
        assert!((trace_norm(&CMat::identity(3)) - 3.0).abs() < 1e-12);
        let m = CMat::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        assert!((trace_norm(&m) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn completion_of_unitary_is_identity_map() {
        let u = expm_scaled(&pauli_y(), C64::new(0.0, -0.3));
        let got = complete_isometry_to_unitary(&u).unwrap();
        assert!(got.sub(&u).max_abs() < 1e-12);
    }

    #[test]
    fn completion_of_first_basis_column() {
        let col = CMat::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let u = complete_isometry_to_unitary(&col).unwrap();
        assert!((u[(0, 0)] - ONE).norm() < 1e-12);
        let resid = u.adjoint().mul(&u).sub(&CMat::identity(2)).max_abs();
        assert!(resid < 1e-12);
    }

    #[test]
    fn completion_of_random_isometry() {
        // 3x2 isometry built from two orthonormal vectors
        let c0 = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8), ZERO];
        let mut c1 = vec![C64::new(0.0, 0.8), C64::new(0.6, 0.0), ZERO];
        // orthogonalize c1 against c0
        let ip: C64 = c0.iter().zip(&c1).map(|(a, b)| a.conj() * b).sum();
        for i in 0..3 {
            c1[i] -= ip * c0[i];
        }
        let n = c1.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut c1 {
            *z /= n;
        }
        let iso = CMat::from_columns(3, &[c0, c1]);
        let u = complete_isometry_to_unitary(&iso).unwrap();
        let resid = u.adjoint().mul(&u).sub(&CMat::identity(3)).max_abs();
        assert!(resid < 1e-10);
    }

    #[test]
    fn support_projection_cases() {
        let e = Ket::basis(3, 1).projector();
        assert!(support_projection(&e, 1e-10).sub(&e).max_abs() < 1e-12);
        assert!(
            support_projection(&CMat::identity(3), 1e-10)
                .sub(&CMat::identity(3))
                .max_abs()
                < 1e-12
        );
        let m = CMat::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 1e-14, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let want = CMat::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(support_projection(&m, 1e-10).sub(&want).max_abs() < 1e-12);
    }

    #[test]
    fn expm_rotation() {
        // exp(-i (pi/2) sigma_y / 2): rotation of |0> by 45 degrees
        let u = expm_scaled(
            &pauli_y().scale(C64::new(std::f64::consts::FRAC_PI_4, 0.0)),
            -I,
        );
        let v = u.mul_vec(Ket::basis(2, 0).amps());
        assert!((v[0].re - (std::f64::consts::FRAC_PI_4).cos()).abs() < 1e-12);
        assert!((v[1].re - (std::f64::consts::FRAC_PI_4).sin()).abs() < 1e-12);
        let uu = u.adjoint().mul(&u);
        assert!(uu.sub(&CMat::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn subspace_complement_and_intersection() {
        let v = Subspace::line(&Ket::basis(3, 0)).unwrap();
        let c = v.orthogonal_complement();
        assert_eq!(c.dim(), 2);
        assert!(c.projector().mul(&v.projector()).max_abs() < 1e-12);
        let w = Subspace::from_span(
            &CMat::from_columns(
                3,
                &[
                    Ket::basis(3, 0).amps().to_vec(),
                    Ket::basis(3, 1).amps().to_vec(),
                ],
            ),
            1e-9,
        );
        let cap = v.intersect(&w);
        assert_eq!(cap.dim(), 1);
        assert!(cap.contains(&Ket::basis(3, 0), 1e-9));
    }

    proptest! {
        #[test]
        fn prop_kron_associativity(seed in 0u64..50) {
            let mut rng = crate::random::seeded_rng(seed);
            let a = crate::random::ginibre(2, 2, &mut rng);
            let b = crate::random::ginibre(2, 3, &mut rng);
            let c = crate::random::ginibre(3, 2, &mut rng);
            let lhs = kron(&kron(&a, &b), &c);
            let rhs = kron(&a, &kron(&b, &c));
            prop_assert!(lhs.sub(&rhs).max_abs() < 1e-12);
        }

        #[test]
        fn prop_partial_trace_preserves_trace(seed in 0u64..50) {
            let mut rng = crate::random::seeded_rng(seed);
            let m = crate::random::random_psd(6, &mut rng);
            let t1 = partial_trace(&m, 2, 3, Keep::First).unwrap().trace();
            let t2 = partial_trace(&m, 2, 3, Keep::Second).unwrap().trace();
            prop_assert!((t1 - m.trace()).norm() < 1e-10);
            prop_assert!((t2 - m.trace()).norm() < 1e-10);
        }

        #[test]
        fn prop_fidelity_symmetric(seed in 0u64..30) {
            let mut rng = crate::random::seeded_rng(seed);
            let a = crate::random::random_psd(3, &mut rng);
            let b = crate::random::random_psd(3, &mut rng);
            let f1 = fidelity_root(&a, &b).unwrap();
            let f2 = fidelity_root(&b, &a).unwrap();
            prop_assert!((f1 - f2).abs() < 1e-9);
        }
    }

    #[test]
    fn fidelity_pure_states_is_overlap() {
        let mut rng = crate::random::seeded_rng(7);
        for _ in 0..100 {
            let psi = crate::random::random_ket(3, &mut rng);
            let phi = crate::random::random_ket(3, &mut rng);
            let f = fidelity_root(&psi.projector(), &phi.projector()).unwrap();
            assert!((f - psi.inner(&phi).norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn completion_unitarity_on_random_isometries() {
        let mut rng = crate::random::seeded_rng(11);
        for _ in 0..20 {
            let u = crate::random::haar_unitary(4, &mut rng);
            let iso = CMat::from_fn(4, 2, |i, j| u[(i, j)]);
            let w = complete_isometry_to_unitary(&iso).unwrap();
            let resid = w.adjoint().mul(&w).sub(&CMat::identity(4)).op_norm();
            assert!(resid < 1e-10);
        }
    }
}
