//! Singular values, Hilbert–Schmidt norms, distances to column spans and the
//! projected block `W = P_{H_{J^c}^⊥} A_J`.
//!
//! Singular values come from a one-sided Jacobi iteration, preceded by a
//! Householder QR when the matrix is tall. Jacobi keeps high relative
//! accuracy on the smallest singular value, which is the quantity every tail
//! experiment thresholds. Spans are orthonormalized by classical Gram–Schmidt
//! with a second reorthogonalization pass.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{check_finite, RealMatrix};

/// Relative tolerance for deciding that a column lies in the span of earlier ones.
pub const RANK_TOLERANCE: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 80;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `‖A‖_HS`, the Euclidean norm of the entries.
pub fn hs_norm(a: &RealMatrix) -> Result<f64> {
    check_finite(a.as_slice())?;
    Ok(norm(a.as_slice()))
}

/// Singular values in descending order, `min(N, n)` of them.
pub fn singular_values(a: &RealMatrix) -> Result<Vec<f64>> {
    check_finite(a.as_slice())?;
    let (n, mut work) = if a.rows() >= a.cols() {
        if a.rows() > a.cols() {
            (a.cols(), householder_r(a.rows(), a.cols(), a.as_slice().to_vec()))
        } else {
            (a.cols(), a.as_slice().to_vec())
        }
    } else {
        let t = a.transpose();
        if t.rows() > t.cols() {
            (t.cols(), householder_r(t.rows(), t.cols(), t.into_col_major()))
        } else {
            (t.cols(), t.into_col_major())
        }
    };
    jacobi_orthogonalize(n, n, &mut work);
    let mut sv: Vec<f64> = work.chunks_exact(n).map(norm).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// Smallest singular value, `inf_{|x|=1} |Ax|` when `N ≥ n`.
pub fn sigma_min(a: &RealMatrix) -> Result<f64> {
    Ok(*singular_values(a)?.last().expect("matrices are non-empty"))
}

pub fn sigma_max(a: &RealMatrix) -> Result<f64> {
    Ok(singular_values(a)?[0])
}

/// Upper-triangular factor of a tall `rows x cols` column-major matrix,
/// returned as a `cols x cols` column-major block.
fn householder_r(rows: usize, cols: usize, mut a: Vec<f64>) -> Vec<f64> {
    let mut v = vec![0.0; rows];
    for k in 0..cols {
        let col = &a[k * rows..(k + 1) * rows];
        let alpha = norm(&col[k..]);
        if alpha == 0.0 {
            continue;
        }
        let sign = if col[k] >= 0.0 { 1.0 } else { -1.0 };
        v[k..].copy_from_slice(&col[k..]);
        v[k] += sign * alpha;
        let vnorm2 = dot(&v[k..], &v[k..]);
        for j in k..cols {
            let cj = &mut a[j * rows..(j + 1) * rows];
            let f = 2.0 * dot(&v[k..], &cj[k..]) / vnorm2;
            for (c, &vi) in cj[k..].iter_mut().zip(&v[k..]) {
                *c -= f * vi;
            }
        }
    }
    let mut r = vec![0.0; cols * cols];
    for j in 0..cols {
        for i in 0..=j {
            r[j * cols + i] = a[j * rows + i];
        }
    }
    r
}

/// Rotates column pairs until all columns are mutually orthogonal; the
/// column norms are then the singular values.
fn jacobi_orthogonalize(rows: usize, cols: usize, u: &mut [f64]) {
    let tol = f64::EPSILON * rows as f64;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (head, tail) = u.split_at_mut(q * rows);
                let up = &mut head[p * rows..(p + 1) * rows];
                let uq = &mut tail[..rows];
                let alpha = dot(up, up);
                let beta = dot(uq, uq);
                let gamma = dot(up, uq);
                if gamma == 0.0 || libm::fabs(gamma) <= tol * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = libm::copysign(1.0, zeta) / (libm::fabs(zeta) + libm::hypot(1.0, zeta));
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for (x, y) in up.iter_mut().zip(uq.iter_mut()) {
                    let (xp, yq) = (*x, *y);
                    *x = c * xp - s * yq;
                    *y = s * xp + c * yq;
                }
            }
        }
        if !rotated {
            return;
        }
    }
}

/// Orthonormal basis of a subspace of `ℝ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<Vec<f64>>,
    tolerance: f64,
}

impl SubspaceBasis {
    /// Orthonormalizes the columns of `b`, dropping any column whose residual
    /// falls below [`RANK_TOLERANCE`] times its norm.
    pub fn from_columns(b: &RealMatrix) -> Self {
        Self::from_vectors(b.rows(), b.columns())
    }

    pub fn from_vectors<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut basis = Self { ambient, vectors: Vec::new(), tolerance: RANK_TOLERANCE };
        for v in vectors {
            basis.push(v);
        }
        basis
    }

    /// Tries to extend the basis by `v`; returns whether it was independent.
    pub fn push(&mut self, v: &[f64]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let scale = norm(v);
        if scale == 0.0 {
            return false;
        }
        let mut w = v.to_vec();
        self.remove_projection(&mut w);
        self.remove_projection(&mut w);
        let r = norm(&w);
        if r <= self.tolerance * scale {
            return false;
        }
        w.iter_mut().for_each(|x| *x /= r);
        self.vectors.push(w);
        true
    }

    fn remove_projection(&self, w: &mut [f64]) {
        let coeffs: Vec<f64> = self.vectors.iter().map(|q| dot(q, w)).collect();
        for (q, c) in self.vectors.iter().zip(coeffs) {
            for (x, qi) in w.iter_mut().zip(q) {
                *x -= c * qi;
            }
        }
    }

    /// `v − P v`, computed with two projection passes.
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut w = v.to_vec();
        self.remove_projection(&mut w);
        self.remove_projection(&mut w);
        w
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Orthonormal basis of the orthogonal complement, of dimension `N − dim`.
    ///
    /// Built from the trailing columns of the full Householder `Q` of the
    /// current basis.
    pub fn complement(&self) -> SubspaceBasis {
        let n = self.ambient;
        let k = self.vectors.len();
        let mut a: Vec<f64> = self.vectors.concat();
        let mut reflectors: Vec<(usize, Vec<f64>)> = Vec::with_capacity(k);
        for j in 0..k {
            let col = &a[j * n..(j + 1) * n];
            let alpha = norm(&col[j..]);
            let mut v = col[j..].to_vec();
            v[0] += libm::copysign(alpha, col[j]);
            let vn2 = dot(&v, &v);
            if vn2 == 0.0 {
                continue;
            }
            for c in j..k {
                let cc = &mut a[c * n + j..(c + 1) * n];
                let f = 2.0 * dot(&v, cc) / vn2;
                cc.iter_mut().zip(&v).for_each(|(x, vi)| *x -= f * vi);
            }
            reflectors.push((j, v));
        }
        let mut out = Vec::with_capacity(n - k);
        for j in k..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            for (start, v) in reflectors.iter().rev() {
                let tail = &mut e[*start..];
                let f = 2.0 * dot(v, tail) / dot(v, v);
                tail.iter_mut().zip(v).for_each(|(x, vi)| *x -= f * vi);
            }
            out.push(e);
        }
        SubspaceBasis { ambient: n, vectors: out, tolerance: self.tolerance }
    }
}

/// `‖v − P_{colspan B} v‖`. Dependent columns of `B` are dropped.
pub fn distance_to_colspan(v: &[f64], b: &RealMatrix) -> Result<f64> {
    if v.len() != b.rows() {
        return Err(Error::DimensionMismatch { expected: b.rows(), found: v.len() });
    }
    check_finite(v)?;
    check_finite(b.as_slice())?;
    let basis = SubspaceBasis::from_columns(b);
    Ok(norm(&basis.residual(v)))
}

/// Indices of `{0..n}` not in `subset`, ascending.
pub fn complement_indices(n: usize, subset: &[usize]) -> Result<Vec<usize>> {
    let mut member = vec![false; n];
    for &j in subset {
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, dim: n });
        }
        if member[j] {
            return Err(Error::InvalidParameter { name: "duplicate column index", value: j as f64 });
        }
        member[j] = true;
    }
    Ok((0..n).filter(|&j| !member[j]).collect())
}

/// Coordinates of `P_{H_{J^c}^⊥} A_J` in an orthonormal basis of `H_{J^c}^⊥`.
///
/// The result has `N − (n − d)` rows and `d = |J|` columns, and satisfies
/// `‖Wx‖ = dist(A_J x, H_{J^c})` for every `x`. Returns
/// [`Error::RankDeficient`] when the columns of `A_{J^c}` are dependent.
pub fn projected_block(a: &RealMatrix, j: &[usize]) -> Result<RealMatrix> {
    if j.is_empty() {
        return Err(Error::ZeroDimension(0));
    }
    check_finite(a.as_slice())?;
    let rest = complement_indices(a.cols(), j)?;
    if rest.len() >= a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: rest.len() });
    }
    let span = SubspaceBasis::from_vectors(a.rows(), rest.iter().map(|&c| a.column(c)));
    if span.dim() < rest.len() {
        return Err(Error::RankDeficient { rank: span.dim(), expected: rest.len() });
    }
    let perp = span.complement();
    let mut w = RealMatrix::zeros(perp.dim(), j.len())?;
    for (c, &col) in j.iter().enumerate() {
        let v = a.column(col);
        for (r, q) in perp.vectors().iter().enumerate() {
            w.set(r, c, dot(q, v));
        }
    }
    Ok(w)
}
